#include "probkg/query/expr_eval.hpp"

#include <bit>
#include <cmath>

#include "probkg/dist/algebra.hpp"
#include "probkg/dist/measures.hpp"
#include "probkg/mc/rng.hpp"
#include "probkg/util/error.hpp"

namespace probkg::query {

Value term_value(kg::TermId id, const TermTable& terms) {
  if (id == kg::kNoTerm) return Value::fault("unbound variable");
  const kg::Term& t = terms.term(id);
  if (const double x = terms.numeric(id); !std::isnan(x)) return Value::number(x);
  if (const auto* l = std::get_if<kg::Literal>(&t); l && l->datatype == kg::kXsdBoolean) {
    if (l->lexical == "true" || l->lexical == "1") return Value::boolean(true);
    if (l->lexical == "false" || l->lexical == "0") return Value::boolean(false);
  }
  Value v;
  if (auto d = terms.distribution(id)) {
    v.kind = Value::Kind::Dist;
    v.dist = std::move(d);
  } else {
    v.kind = Value::Kind::Term;
  }
  v.term = id;
  return v;
}

CompiledExpr compile_expr(const ExprPtr& e, const VarTable& vars, TermTable& terms) {
  CompiledExpr c;
  c.kind = e->kind;
  c.op = e->op;
  c.builtin = e->builtin;
  if (e->kind == Expr::Kind::Var) {
    const auto id = vars.find(e->name);
    if (!id) throw Error(Errc::UnboundVariable, "?" + e->name + " is not bound");
    c.var = *id;
  } else if (e->kind == Expr::Kind::Const) {
    c.constant = term_value(terms.intern(e->constant), terms);
  }
  for (const auto& a : e->args) c.args.push_back(compile_expr(a, vars, terms));
  return c;
}

std::optional<bool> truth(const Value& v) {
  switch (v.kind) {
    case Value::Kind::Bool: return v.b;
    case Value::Kind::Number: return !std::isnan(v.num) && v.num != 0.0;
    default: return std::nullopt;
  }
}

std::optional<kg::TermId> to_term(const Value& v, TermTable& terms) {
  switch (v.kind) {
    case Value::Kind::Error: return std::nullopt;
    case Value::Kind::Number:
      if (!std::isfinite(v.num)) return std::nullopt;
      return terms.intern(kg::make_number(v.num));
    case Value::Kind::Bool: return terms.intern(kg::make_boolean(v.b));
    case Value::Kind::Dist:
      if (v.term != kg::kNoTerm) return v.term;
      return terms.intern(kg::make_dist(*v.dist));
    case Value::Kind::Term: return v.term;
  }
  return std::nullopt;
}

namespace {

Value dist_value(dist::Distribution d) {
  Value v;
  v.kind = Value::Kind::Dist;
  v.dist = std::make_shared<const dist::Distribution>(std::move(d));
  return v;
}

Value compare(const std::string& op, const Value& a, const Value& b) {
  if (a.kind == Value::Kind::Number && b.kind == Value::Kind::Number) {
    const double x = a.num, y = b.num;
    if (op == "<") return Value::boolean(x < y);
    if (op == "<=") return Value::boolean(x <= y);
    if (op == ">") return Value::boolean(x > y);
    if (op == ">=") return Value::boolean(x >= y);
    if (op == "=") return Value::boolean(x == y);
    return Value::boolean(x != y);
  }
  if (op == "=" || op == "!=") {
    bool eq = false;
    if (a.kind == Value::Kind::Bool && b.kind == Value::Kind::Bool)
      eq = a.b == b.b;
    else if (a.term != kg::kNoTerm && b.term != kg::kNoTerm)
      eq = a.term == b.term;
    else if (a.kind == Value::Kind::Dist && b.kind == Value::Kind::Dist)
      eq = *a.dist == *b.dist;
    else
      return Value::fault("incomparable operands");
    return Value::boolean(op == "=" ? eq : !eq);
  }
  return Value::fault("ordering needs numeric operands");
}

Value builtin(Builtin b, const std::vector<Value>& args) {
  for (const auto& a : args)
    if (a.kind == Value::Kind::Error) return a;
  auto need_dist = [&](std::size_t i) -> const dist::Distribution* {
    return args[i].kind == Value::Kind::Dist ? args[i].dist.get() : nullptr;
  };
  auto need_num = [&](std::size_t i) -> std::optional<double> {
    if (args[i].kind == Value::Kind::Number) return args[i].num;
    return std::nullopt;
  };
  const std::string name(builtin_name(b));
  try {
    switch (b) {
      case Builtin::Pgt:
      case Builtin::Cdf: {
        const auto* d = need_dist(0);
        const auto x = need_num(1);
        if (!d || !x) return Value::fault(name + " expects (distribution, number)");
        return Value::number(b == Builtin::Pgt ? dist::prob_mass(*d, {*x, dist::kInf}) : dist::cdf(*d, *x));
      }
      case Builtin::Pbetween: {
        const auto* d = need_dist(0);
        const auto lo = need_num(1), hi = need_num(2);
        if (!d || !lo || !hi) return Value::fault("PBETWEEN expects (distribution, number, number)");
        if (*lo > *hi) return Value::fault("PBETWEEN bounds are reversed");
        return Value::number(dist::prob_mass(*d, {*lo, *hi}));
      }
      case Builtin::Jsd: {
        const auto* x = need_dist(0);
        const auto* y = need_dist(1);
        if (!x || !y) return Value::fault("JSD expects two distributions");
        return Value::number(dist::jsd_auto(*x, *y));
      }
      case Builtin::Conv:
      case Builtin::Fuse: {
        const auto* x = need_dist(0);
        const auto* y = need_dist(1);
        const auto* gx = x ? std::get_if<dist::Gmm>(x) : nullptr;
        const auto* gy = y ? std::get_if<dist::Gmm>(y) : nullptr;
        if (!gx || !gy) return Value::fault(name + " expects two mixtures");
        return dist_value(b == Builtin::Conv ? dist::convolve(*gx, *gy) : dist::fuse(*gx, *gy));
      }
      case Builtin::Mean:
      case Builtin::Var: {
        const auto* d = need_dist(0);
        if (!d) return Value::fault(name + " expects a distribution");
        const auto m = dist::moments(*d);
        const auto& v = b == Builtin::Mean ? m.mean : m.variance;
        if (v.size() != 1) return Value::fault(name + " needs a 1-dimensional distribution");
        return Value::number(v[0]);
      }
    }
  } catch (const Error& e) {
    return Value::fault(e.what());
  }
  return Value::fault("unknown builtin");
}

// `PGT(d, c) op theta` with a constant theta, decided by sampling.
std::optional<Value> sampled_threshold(const CompiledExpr& e, const Row& row, const ExprContext& ctx) {
  if (e.kind != Expr::Kind::Binary) return std::nullopt;
  const bool lower = e.op == ">=" || e.op == ">";
  const bool upper = e.op == "<" || e.op == "<=";
  if (!lower && !upper) return std::nullopt;
  const auto& call = e.args[0];
  const auto& rhs = e.args[1];
  if (call.kind != Expr::Kind::Call || call.builtin != Builtin::Pgt || rhs.kind != Expr::Kind::Const ||
      rhs.constant.kind != Value::Kind::Number)
    return std::nullopt;
  const Value d = eval_expr(call.args[0], row, ctx);
  const Value c = eval_expr(call.args[1], row, ctx);
  if (d.kind != Value::Kind::Dist || c.kind != Value::Kind::Number)
    return Value::fault("PGT expects (distribution, number)");
  const double theta = rhs.constant.num;
  if (!(theta > 0.0 && theta < 1.0)) return std::nullopt;
  mc::SamplerConfig cfg = ctx.sampling->config;
  const std::uint64_t item = (static_cast<std::uint64_t>(d.term) << 32) ^ std::bit_cast<std::uint64_t>(c.num);
  cfg.seed = mc::derive_stream(cfg.seed, mc::StreamTag::Filter, item);
  try {
    const auto dec = mc::mc_threshold(*d.dist, c.num, theta, cfg);
    const bool above = dec.verdict == mc::Verdict::Above ||
                       (dec.verdict == mc::Verdict::Undecided && dec.estimate >= theta);
    return Value::boolean(lower ? above : !above);
  } catch (const Error& err) {
    return Value::fault(err.what());
  }
}

// PGT, CDF and PBETWEEN on a graph mixture read the packed parameters
// instead of materialising a distribution value.
std::optional<Value> packed_call(const CompiledExpr& e, const Row& row, const ExprContext& ctx) {
  if (e.builtin != Builtin::Pgt && e.builtin != Builtin::Cdf && e.builtin != Builtin::Pbetween) return std::nullopt;
  if (e.args.empty() || e.args[0].kind != Expr::Kind::Var) return std::nullopt;
  const kg::TermId id = row.vals[e.args[0].var];
  if (id == kg::kNoTerm) return std::nullopt;
  const auto wms = ctx.terms->packed_gmm(id);
  if (wms.empty()) return std::nullopt;
  double x[2] = {0.0, 0.0};
  for (std::size_t i = 1; i < e.args.size() && i < 3; ++i) {
    const Value v = eval_expr(e.args[i], row, ctx);
    if (v.kind != Value::Kind::Number) return std::nullopt;
    x[i - 1] = v.num;
  }
  dist::Interval iv;
  switch (e.builtin) {
    case Builtin::Pgt: iv = {x[0], dist::kInf}; break;
    case Builtin::Cdf: iv = {-dist::kInf, x[0]}; break;
    default:
      if (x[0] > x[1]) return std::nullopt;
      iv = {x[0], x[1]};
  }
  try {
    return Value::number(dist::prob_mass_packed(wms, iv));
  } catch (const Error&) {
    return std::nullopt;
  }
}

}  // namespace

Value eval_expr(const CompiledExpr& e, const Row& row, const ExprContext& ctx) {
  switch (e.kind) {
    case Expr::Kind::Var: return term_value(row.vals[e.var], *ctx.terms);
    case Expr::Kind::Const: return e.constant;
    case Expr::Kind::Not: {
      const auto t = truth(eval_expr(e.args[0], row, ctx));
      return t ? Value::boolean(!*t) : Value::fault("! needs a boolean");
    }
    case Expr::Kind::Neg: {
      const Value v = eval_expr(e.args[0], row, ctx);
      return v.kind == Value::Kind::Number ? Value::number(-v.num) : Value::fault("- needs a number");
    }
    case Expr::Kind::Binary: {
      if (e.op == "&&" || e.op == "||") {
        const auto a = truth(eval_expr(e.args[0], row, ctx));
        const bool is_and = e.op == "&&";
        if (a && *a != is_and) return Value::boolean(*a);
        const auto b = truth(eval_expr(e.args[1], row, ctx));
        if (b && *b != is_and) return Value::boolean(*b);
        if (a && b) return Value::boolean(is_and);
        return Value::fault("logical operand error");
      }
      if (ctx.sampling)
        if (auto v = sampled_threshold(e, row, ctx)) return *v;
      const Value a = eval_expr(e.args[0], row, ctx);
      if (a.kind == Value::Kind::Error) return a;
      const Value b = eval_expr(e.args[1], row, ctx);
      if (b.kind == Value::Kind::Error) return b;
      if (e.op == "+" || e.op == "-" || e.op == "*" || e.op == "/") {
        if (a.kind != Value::Kind::Number || b.kind != Value::Kind::Number)
          return Value::fault("arithmetic needs numbers");
        if (e.op == "+") return Value::number(a.num + b.num);
        if (e.op == "-") return Value::number(a.num - b.num);
        if (e.op == "*") return Value::number(a.num * b.num);
        if (b.num == 0.0) return Value::fault("division by zero");
        return Value::number(a.num / b.num);
      }
      return compare(e.op, a, b);
    }
    case Expr::Kind::Call: {
      if (auto v = packed_call(e, row, ctx)) return *v;
      std::vector<Value> args;
      args.reserve(e.args.size());
      for (const auto& a : e.args) args.push_back(eval_expr(a, row, ctx));
      return builtin(e.builtin, args);
    }
  }
  return Value::fault("bad expression");
}

}  // namespace probkg::query
