#include <algorithm>
#include <cmath>

#include "dsl/internal.hpp"
#include "fulfil/dsl/dsl.hpp"

namespace fulfil::dsl {

std::string to_string(Status s) {
  switch (s) {
    case Status::Ok:
      return "ok";
    case Status::ParseError:
      return "parse_error";
    case Status::RuntimeError:
      return "runtime_error";
    case Status::BudgetExceeded:
      return "budget_exceeded";
  }
  return "ok";
}

namespace {

struct BudgetExceeded {};

[[noreturn]] void error_at(const Expr& e, const std::string& msg) {
  throw RuntimeError("line " + std::to_string(e.line) + ", column " + std::to_string(e.column) + ": " + msg);
}

class Interpreter {
 public:
  explicit Interpreter(ExecEnv& env) : env_(env) {}

  void run(const Block& block) {
    for (const auto& s : block) statement(s);
  }

  Value eval(const Expr& e) {
    step();
    switch (e.kind) {
      case Expr::Kind::Literal:
        return e.literal;
      case Expr::Kind::FString: {
        std::string out;
        for (const auto& p : e.parts) out += p.hole ? render(eval(*p.hole)) : p.text;
        return Value{std::move(out)};
      }
      case Expr::Kind::Name: {
        auto it = env_.bindings.find(e.name);
        if (it == env_.bindings.end()) error_at(e, "name '" + e.name + "' is not defined");
        return it->second;
      }
      case Expr::Kind::HostAttr:
        return host_attr(e);
      case Expr::Kind::Call:
        return call(e);
      case Expr::Kind::Index:
        return index(e, eval(*e.items[0]), eval(*e.items[1]));
      case Expr::Kind::List: {
        Value::List items;
        for (const auto& i : e.items) items.push_back(eval(*i));
        return Value{std::move(items)};
      }
      case Expr::Kind::Unary: {
        Value v = eval(*e.items[0]);
        if (e.op == "not") return Value{!truthy(v)};
        const Value& s = scalar(v);
        if (!s.is_number()) error_at(e, "bad operand type for unary " + e.op + ": '" + type_name(s) + "'");
        if (e.op == "+") return s.is_bool() ? Value{s.as_int()} : s;
        if (s.is_float()) return Value{-s.as_double()};
        if (s.is_decimal()) return Value{Decimal{-s.as_double()}};
        return Value{-s.as_int()};
      }
      case Expr::Kind::Binary:
        return binary(e, eval(*e.items[0]), eval(*e.items[1]));
      case Expr::Kind::Compare: {
        Value lhs = eval(*e.items[0]);
        for (std::size_t i = 0; i < e.ops.size(); ++i) {
          Value rhs = eval(*e.items[i + 1]);
          if (!compare(e, e.ops[i], lhs, rhs)) return Value{false};
          lhs = std::move(rhs);
        }
        return Value{true};
      }
      case Expr::Kind::And: {
        Value v;
        for (const auto& i : e.items) {
          v = eval(*i);
          if (!truthy(v)) return v;
        }
        return v;
      }
      case Expr::Kind::Or: {
        Value v;
        for (const auto& i : e.items) {
          v = eval(*i);
          if (truthy(v)) return v;
        }
        return v;
      }
    }
    error_at(e, "unsupported expression");
  }

 private:
  void step() {
    if (++steps_ > env_.step_budget) throw BudgetExceeded{};
  }

  void statement(const Stmt& s) {
    step();
    switch (s.kind) {
      case Stmt::Kind::Pass:
        return;
      case Stmt::Kind::Expr:
        eval(*s.value);
        return;
      case Stmt::Kind::Assign:
        env_.bindings[s.target] = eval(*s.value);
        return;
      case Stmt::Kind::AugAssign: {
        auto it = env_.bindings.find(s.target);
        if (it == env_.bindings.end()) error_at(*s.value, "name '" + s.target + "' is not defined");
        Value rhs = eval(*s.value);
        env_.bindings[s.target] = binary(*s.value, env_.bindings[s.target], rhs, s.op);
        return;
      }
      case Stmt::Kind::If:
        for (const auto& b : s.branches) {
          if (truthy(eval(*b.condition))) {
            run(b.body);
            return;
          }
        }
        run(s.body);
        return;
      case Stmt::Kind::For: {
        Value seq = eval(*s.value);
        if (seq.is_string()) {
          std::string text = seq.as_string();
          for (char c : text) {
            env_.bindings[s.target] = Value{std::string(1, c)};
            run(s.body);
          }
          return;
        }
        if (!seq.is_list()) error_at(*s.value, "'" + type_name(seq) + "' object is not iterable");
        Value::List items = seq.as_list();
        for (auto& item : items) {
          env_.bindings[s.target] = std::move(item);
          run(s.body);
        }
        return;
      }
    }
  }

  Value index(const Expr& e, const Value& seq, const Value& idx_value) {
    const Value& idx = scalar(idx_value);
    if (!idx.is_int() && !idx.is_bool()) error_at(e, "indices must be integers, not " + type_name(idx));
    std::int64_t i = idx.as_int();
    auto fix = [&](std::size_t n) {
      std::int64_t k = i < 0 ? i + static_cast<std::int64_t>(n) : i;
      if (k < 0 || k >= static_cast<std::int64_t>(n)) error_at(e, "index out of range");
      return static_cast<std::size_t>(k);
    };
    if (seq.is_list()) return seq.as_list()[fix(seq.as_list().size())];
    if (seq.is_string()) return Value{std::string(1, seq.as_string()[fix(seq.as_string().size())])};
    error_at(e, "'" + type_name(seq) + "' object is not subscriptable");
  }

  static int rank(const Value& v) {
    if (v.is_float()) return 3;
    if (v.is_decimal()) return 2;
    return 1;
  }

  Value binary(const Expr& e, const Value& lhs_value, const Value& rhs_value, const std::string& op_override = "") {
    const std::string& op = op_override.empty() ? e.op : op_override;
    const Value& a = lhs_value.is_list() && rhs_value.is_list() ? lhs_value : scalar(lhs_value);
    const Value& b = lhs_value.is_list() && rhs_value.is_list() ? rhs_value : scalar(rhs_value);
    if (op == "+" && a.is_string() && b.is_string()) return Value{a.as_string() + b.as_string()};
    if (op == "+" && a.is_list() && b.is_list()) {
      Value::List out = a.as_list();
      out.insert(out.end(), b.as_list().begin(), b.as_list().end());
      return Value{std::move(out)};
    }
    if (!a.is_number() || !b.is_number()) {
      error_at(e, "unsupported operand types for " + op + ": '" + type_name(a) + "' and '" + type_name(b) + "'");
    }
    int r = std::max(rank(a), rank(b));
    if (op == "/") {
      if (b.as_double() == 0.0) error_at(e, "division by zero");
      return Value{a.as_double() / b.as_double()};
    }
    if (r == 1) {
      std::int64_t x = a.as_int(), y = b.as_int();
      if (op == "+") return Value{x + y};
      if (op == "-") return Value{x - y};
      if (op == "*") return Value{x * y};
      if (y == 0) error_at(e, "division by zero");
      std::int64_t q = x / y, m = x % y;
      if (m != 0 && ((m < 0) != (y < 0))) {
        --q;
        m += y;
      }
      return Value{op == "//" ? q : m};
    }
    double x = a.as_double(), y = b.as_double(), out = 0;
    if (op == "+") out = x + y;
    else if (op == "-") out = x - y;
    else if (op == "*") out = x * y;
    else {
      if (y == 0.0) error_at(e, "division by zero");
      out = op == "//" ? std::floor(x / y) : x - y * std::floor(x / y);
    }
    return r == 3 ? Value{out} : Value{Decimal{out}};
  }

  static bool equal(const Value& a, const Value& b) {
    if (a.is_number() && b.is_number()) {
      if (rank(a) == 1 && rank(b) == 1) return a.as_int() == b.as_int();
      return a.as_double() == b.as_double();
    }
    if (a.is_list() && b.is_list()) {
      const auto &x = a.as_list(), &y = b.as_list();
      if (x.size() != y.size()) return false;
      for (std::size_t i = 0; i < x.size(); ++i)
        if (!equal(x[i], y[i])) return false;
      return true;
    }
    return a == b;
  }

  bool compare(const Expr& e, const std::string& op, const Value& lhs, const Value& rhs) {
    if (op == "in" || op == "not in") {
      bool found = false;
      if (rhs.is_list()) {
        for (const auto& item : rhs.as_list()) found = found || equal(scalar(lhs), item);
      } else if (rhs.is_string() && scalar(lhs).is_string()) {
        found = rhs.as_string().find(scalar(lhs).as_string()) != std::string::npos;
      } else {
        error_at(e, "argument of type '" + type_name(rhs) + "' is not iterable");
      }
      return op == "in" ? found : !found;
    }
    const Value& a = lhs.is_list() && rhs.is_list() ? lhs : scalar(lhs);
    const Value& b = lhs.is_list() && rhs.is_list() ? rhs : scalar(rhs);
    if (op == "==") return equal(a, b);
    if (op == "!=") return !equal(a, b);
    int c;
    if (a.is_number() && b.is_number()) {
      if (rank(a) == 1 && rank(b) == 1) c = a.as_int() < b.as_int() ? -1 : a.as_int() > b.as_int();
      else c = a.as_double() < b.as_double() ? -1 : a.as_double() > b.as_double();
    } else if (a.is_string() && b.is_string()) {
      c = a.as_string().compare(b.as_string());
    } else {
      error_at(e, "'" + op + "' not supported between '" + type_name(a) + "' and '" + type_name(b) + "'");
    }
    if (op == "<") return c < 0;
    if (op == "<=") return c <= 0;
    if (op == ">") return c > 0;
    return c >= 0;
  }

  opt::Model& model(const Expr& e) {
    if (!env_.hosts.model) error_at(e, "no model is bound");
    return *env_.hosts.model;
  }

  Value host_attr(const Expr& e) {
    opt::Model& m = model(e);
    if (!m.outcome_current()) error_at(e, e.name + " requires model.optimize() first");
    const auto& outcome = *m.last_outcome();
    if (e.name == "model.feasible") return Value{outcome.feasible};
    if (!outcome.objective) return Value{};
    return Value{Decimal{outcome.objective->to_double()}};
  }

  // Binds call arguments to named parameters; positional args fill in order.
  std::map<std::string, Value> bind(const Expr& e, const std::vector<std::string>& params,
                                    const std::vector<std::string>& required) {
    std::map<std::string, Value> out;
    std::size_t positional = 0;
    for (const auto& a : e.args) {
      std::string name = a.keyword;
      if (name.empty()) {
        if (positional >= params.size()) error_at(e, e.name + "() takes at most " + std::to_string(params.size()) + " arguments");
        name = params[positional++];
      } else if (std::find(params.begin(), params.end(), name) == params.end()) {
        error_at(e, e.name + "() got an unexpected keyword argument '" + name + "'");
      }
      if (out.count(name)) error_at(e, e.name + "() got multiple values for '" + name + "'");
      out[name] = eval(*a.value);
    }
    for (const auto& r : required)
      if (!out.count(r)) error_at(e, e.name + "() missing required argument '" + r + "'");
    return out;
  }

  std::string id_arg(const Expr& e, const std::map<std::string, Value>& args, const std::string& name) {
    auto it = args.find(name);
    if (it == args.end()) return std::string(core::kWildcard);
    const Value& v = scalar(it->second);
    if (v.is_string()) return v.as_string();
    if (v.is_int()) return std::to_string(v.as_int());
    error_at(e, "argument '" + name + "' must be a string, not " + type_name(v));
  }

  core::WeekPattern week_arg(const Expr& e, const std::map<std::string, Value>& args) {
    auto it = args.find("date");
    if (it == args.end()) return core::AnyWeek{};
    const Value& v = scalar(it->second);
    if (v.is_int()) return static_cast<core::Week>(v.as_int());
    if (v.is_decimal() && std::floor(v.as_double()) == v.as_double()) return static_cast<core::Week>(v.as_double());
    if (!v.is_string()) error_at(e, "argument 'date' must be a week or pattern, not " + type_name(v));
    try {
      return core::parse_week_pattern(v.as_string());
    } catch (const std::exception& ex) {
      error_at(e, ex.what());
    }
  }

  core::Enforce enforce_arg(const Expr& e, const std::map<std::string, Value>& args) {
    const Value& v = scalar(args.at("enforce"));
    if (!v.is_string()) error_at(e, "argument 'enforce' must be a string");
    try {
      return core::parse_enforce(v.as_string());
    } catch (const std::exception& ex) {
      error_at(e, ex.what());
    }
  }

  void add_constraint(const Expr& e, core::Constraint c) {
    try {
      model(e).add_constraint(std::move(c), opt::Scope::Scenario);
    } catch (const opt::ConstraintError& ex) {
      error_at(e, ex.what());
    }
  }

  Value call(const Expr& e) {
    const std::string& f = e.name;
    if (f == "logger.log") {
      std::string line;
      for (std::size_t i = 0; i < e.args.size(); ++i) {
        if (!e.args[i].keyword.empty()) error_at(e, "logger.log() takes no keyword arguments");
        if (i) line += ' ';
        line += render(eval(*e.args[i].value));
      }
      env_.log.push_back(std::move(line));
      return Value{};
    }
    if (f == "retrieve") {
      auto args = bind(e, {"query"}, {"query"});
      const Value& q = scalar(args["query"]);
      if (!q.is_string()) error_at(e, "retrieve() expects a query string");
      if (!env_.hosts.store) error_at(e, "no data store is bound");
      try {
        return from_query(query::run_query(q.as_string(), *env_.hosts.store));
      } catch (const std::exception& ex) {
        error_at(e, std::string("query failed: ") + ex.what());
      }
    }
    if (f == "len") {
      auto args = bind(e, {"obj"}, {"obj"});
      const Value& v = args["obj"];
      if (v.is_list()) return Value{static_cast<std::int64_t>(v.as_list().size())};
      if (v.is_string()) return Value{static_cast<std::int64_t>(v.as_string().size())};
      error_at(e, "object of type '" + type_name(v) + "' has no len()");
    }
    if (f == "model.optimize") {
      bind(e, {}, {});
      model(e).optimize();
      return Value{};
    }
    if (f == "model.reset") {
      bind(e, {}, {});
      model(e).reset();
      return Value{};
    }
    if (f == "plan.update") {
      bind(e, {}, {});
      opt::Model& m = model(e);
      if (!env_.hosts.plan) error_at(e, "no plan store is bound");
      if (!m.outcome_current()) m.optimize();
      try {
        opt::update_plan(*env_.hosts.plan, *m.last_outcome());
      } catch (const opt::CommitError& ex) {
        error_at(e, ex.what());
      }
      m.commit_scenario();
      return Value{};
    }
    if (f == "demand.add_constraint") {
      auto args = bind(e, {"demand_id", "date", "enforce"}, {"enforce"});
      core::Constraint c;
      c.kind = core::ConstraintKind::DockDate;
      c.demand_id = id_arg(e, args, "demand_id");
      c.week_or_pattern = week_arg(e, args);
      c.enforce = enforce_arg(e, args);
      add_constraint(e, std::move(c));
      return Value{};
    }
    if (f == "supply.add_constraint") {
      auto args = bind(e, {"supply_id", "demand", "date", "enforce"}, {"enforce"});
      core::Constraint c;
      c.kind = core::ConstraintKind::SupplyPairing;
      c.supplier_id = id_arg(e, args, "supply_id");
      c.demand_id = id_arg(e, args, "demand");
      c.week_or_pattern = week_arg(e, args);
      c.enforce = enforce_arg(e, args);
      add_constraint(e, std::move(c));
      return Value{};
    }
    if (f == "shipping.add_constraint") {
      auto args = bind(e, {"demand_id", "method", "enforce", "date"}, {"method", "enforce"});
      core::Constraint c;
      c.kind = core::ConstraintKind::ShippingMethod;
      c.demand_id = id_arg(e, args, "demand_id");
      c.method = id_arg(e, args, "method");
      c.week_or_pattern = week_arg(e, args);
      c.enforce = enforce_arg(e, args);
      add_constraint(e, std::move(c));
      return Value{};
    }
    error_at(e, "unknown host function '" + f + "'");
  }

  ExecEnv& env_;
  long steps_ = 0;
};

}  // namespace

ExecutionResult execute(const Script& script, ExecEnv& env) {
  ExecutionResult result;
  std::size_t first = env.log.size();
  try {
    Interpreter(env).run(script.statements);
  } catch (const BudgetExceeded&) {
    result.status = Status::BudgetExceeded;
    result.error_detail = "step budget of " + std::to_string(env.step_budget) + " exceeded";
  } catch (const RuntimeError& ex) {
    result.status = Status::RuntimeError;
    result.error_detail = ex.what();
  }
  result.logs.assign(env.log.begin() + static_cast<std::ptrdiff_t>(first), env.log.end());
  return result;
}

ExecutionResult run_snippet(std::string_view text, ExecEnv& env) {
  Script script;
  try {
    script = parse_script(text);
  } catch (const ParseError& ex) {
    ExecutionResult r;
    r.status = Status::ParseError;
    r.error_detail = ex.what();
    return r;
  }
  return execute(script, env);
}

std::string interpolate(std::string_view tmpl, ExecEnv& env) {
  std::string out;
  int line = 1, column = 1;
  auto bump = [&](char c) {
    if (c == '\n') {
      ++line;
      column = 1;
    } else {
      ++column;
    }
  };
  for (std::size_t i = 0; i < tmpl.size();) {
    char c = tmpl[i];
    if ((c == '{' || c == '}') && i + 1 < tmpl.size() && tmpl[i + 1] == c) {
      out += c;
      bump(c);
      bump(c);
      i += 2;
      continue;
    }
    if (c == '}') throw ParseError("single '}' in template", line, column);
    if (c != '{') {
      out += c;
      bump(c);
      ++i;
      continue;
    }
    std::size_t close = tmpl.find('}', i + 1);
    if (close == std::string_view::npos) throw ParseError("unterminated '{' in template", line, column);
    ExprPtr hole = parse_hole(tmpl.substr(i + 1, close - i - 1), line, column + 1);
    Interpreter interp(env);
    try {
      out += render(interp.eval(*hole));
    } catch (const BudgetExceeded&) {
      throw RuntimeError("step budget exceeded in template");
    }
    for (; i <= close; ++i) bump(tmpl[i]);
  }
  return out;
}

}  // namespace fulfil::dsl
