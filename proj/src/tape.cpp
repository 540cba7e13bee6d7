#include "plastokit/tape.hpp"

#include <cmath>

#include "plastokit/errors.hpp"

namespace plastokit {

namespace {
thread_local Tape* g_active = nullptr;

Tape& require_active() {
  if (g_active == nullptr) throw InvalidArgument("Var operation with no active tape");
  return *g_active;
}
}  // namespace

Tape* Tape::active() { return g_active; }

Tape::Scope::Scope(Tape& t) : prev_(g_active) { g_active = &t; }
Tape::Scope::~Scope() { g_active = prev_; }

Var Tape::variable(double v) {
  nodes_.push_back({TapeOp::Leaf, -1, -1, 0.0, v, 0.0, 0.0});
  return Var(v, static_cast<int>(nodes_.size() - 1));
}

void Tape::evaluate(Node& n, double va, double vb) {
  switch (n.op) {
    case TapeOp::Leaf:
      break;
    case TapeOp::Add:
      n.val = va + vb;
      n.da = 1.0;
      n.db = 1.0;
      break;
    case TapeOp::Sub:
      n.val = va - vb;
      n.da = 1.0;
      n.db = -1.0;
      break;
    case TapeOp::Mul:
      n.val = va * vb;
      n.da = vb;
      n.db = va;
      break;
    case TapeOp::Div:
      n.val = va / vb;
      n.da = 1.0 / vb;
      n.db = -n.val / vb;
      break;
    case TapeOp::Neg:
      n.val = -va;
      n.da = -1.0;
      break;
    case TapeOp::AddC:
      n.val = va + n.c;
      n.da = 1.0;
      break;
    case TapeOp::MulC:
      n.val = va * n.c;
      n.da = n.c;
      break;
    case TapeOp::DivC:
      n.val = va / n.c;
      n.da = 1.0 / n.c;
      break;
    case TapeOp::CSub:
      n.val = n.c - va;
      n.da = -1.0;
      break;
    case TapeOp::CDiv:
      n.val = n.c / va;
      n.da = -n.val / va;
      break;
    case TapeOp::Exp:
      n.val = std::exp(va);
      n.da = n.val;
      break;
    case TapeOp::Log:
      n.val = std::log(va);
      n.da = 1.0 / va;
      break;
    case TapeOp::Log1p:
      n.val = std::log1p(va);
      n.da = 1.0 / (1.0 + va);
      break;
    case TapeOp::Sqrt:
      n.val = std::sqrt(va);
      n.da = 0.5 / n.val;
      break;
    case TapeOp::PowC:
      n.val = std::pow(va, n.c);
      n.da = n.c * std::pow(va, n.c - 1.0);
      break;
    case TapeOp::Abs:
      n.val = std::abs(va);
      n.da = va < 0.0 ? -1.0 : 1.0;
      break;
  }
}

Var Tape::record(TapeOp op, const Var& a, const Var& b, double c) {
  Node n{op, a.idx, b.idx, c, 0.0, 0.0, 0.0};
  evaluate(n, a.v, b.v);
  nodes_.push_back(n);
  return Var(n.val, static_cast<int>(nodes_.size() - 1));
}

void Tape::set_leaf(int idx, double v) {
  Node& n = nodes_.at(static_cast<std::size_t>(idx));
  if (n.op != TapeOp::Leaf) throw InvalidArgument("set_leaf on a non-leaf node");
  n.val = v;
}

void Tape::replay() {
  for (auto& n : nodes_) {
    if (n.op == TapeOp::Leaf) continue;
    const double va = n.a >= 0 ? nodes_[static_cast<std::size_t>(n.a)].val : 0.0;
    const double vb = n.b >= 0 ? nodes_[static_cast<std::size_t>(n.b)].val : 0.0;
    evaluate(n, va, vb);
  }
}

void Tape::backward(std::vector<double>& adj) const {
  if (adj.size() != nodes_.size()) throw InvalidArgument("adjoint vector size mismatch");
  for (std::size_t k = nodes_.size(); k-- > 0;) {
    const Node& n = nodes_[k];
    const double g = adj[k];
    if (g == 0.0) continue;
    if (n.a >= 0) adj[static_cast<std::size_t>(n.a)] += g * n.da;
    if (n.b >= 0) adj[static_cast<std::size_t>(n.b)] += g * n.db;
  }
}

std::vector<double> Tape::gradient(const Var& out) const {
  std::vector<double> adj(nodes_.size(), 0.0);
  if (out.idx >= 0) {
    adj[static_cast<std::size_t>(out.idx)] = 1.0;
    backward(adj);
  }
  return adj;
}

Var operator+(const Var& a, const Var& b) {
  if (a.is_constant() && b.is_constant()) return Var(a.v + b.v);
  if (b.is_constant()) return require_active().record(TapeOp::AddC, a, Var(), b.v);
  if (a.is_constant()) return require_active().record(TapeOp::AddC, b, Var(), a.v);
  return require_active().record(TapeOp::Add, a, b, 0.0);
}

Var operator-(const Var& a, const Var& b) {
  if (a.is_constant() && b.is_constant()) return Var(a.v - b.v);
  if (b.is_constant()) return require_active().record(TapeOp::AddC, a, Var(), -b.v);
  if (a.is_constant()) return require_active().record(TapeOp::CSub, b, Var(), a.v);
  return require_active().record(TapeOp::Sub, a, b, 0.0);
}

Var operator*(const Var& a, const Var& b) {
  if (a.is_constant() && b.is_constant()) return Var(a.v * b.v);
  if (b.is_constant()) return require_active().record(TapeOp::MulC, a, Var(), b.v);
  if (a.is_constant()) return require_active().record(TapeOp::MulC, b, Var(), a.v);
  return require_active().record(TapeOp::Mul, a, b, 0.0);
}

Var operator/(const Var& a, const Var& b) {
  if (a.is_constant() && b.is_constant()) return Var(a.v / b.v);
  if (b.is_constant()) return require_active().record(TapeOp::DivC, a, Var(), b.v);
  if (a.is_constant()) return require_active().record(TapeOp::CDiv, b, Var(), a.v);
  return require_active().record(TapeOp::Div, a, b, 0.0);
}

Var operator-(const Var& a) {
  if (a.is_constant()) return Var(-a.v);
  return require_active().record(TapeOp::Neg, a, Var(), 0.0);
}

namespace {
Var unary(TapeOp op, const Var& a, double c = 0.0) {
  if (a.is_constant()) {
    switch (op) {
      case TapeOp::Exp: return Var(std::exp(a.v));
      case TapeOp::Log: return Var(std::log(a.v));
      case TapeOp::Log1p: return Var(std::log1p(a.v));
      case TapeOp::Sqrt: return Var(std::sqrt(a.v));
      case TapeOp::PowC: return Var(std::pow(a.v, c));
      case TapeOp::Abs: return Var(std::abs(a.v));
      default: throw InvalidArgument("unsupported unary tape op");
    }
  }
  return require_active().record(op, a, Var(), c);
}
}  // namespace

Var exp(const Var& a) { return unary(TapeOp::Exp, a); }
Var log(const Var& a) { return unary(TapeOp::Log, a); }
Var log1p(const Var& a) { return unary(TapeOp::Log1p, a); }
Var sqrt(const Var& a) { return unary(TapeOp::Sqrt, a); }
Var pow(const Var& a, double e) { return unary(TapeOp::PowC, a, e); }
Var pow(const Var& a, const Var& e) {
  if (e.is_constant()) return pow(a, e.v);
  return exp(e * log(a));
}
Var abs(const Var& a) { return unary(TapeOp::Abs, a); }

}  // namespace plastokit
