#pragma once

#include <cmath>
#include <cstdint>
#include <vector>

namespace plastokit {

class Tape;

/// Scalar recorded on the thread's active tape. A Var with index -1 is a
/// constant and never appears on the tape.
struct Var {
  double v = 0.0;
  int idx = -1;

  Var() = default;
  Var(double value) : v(value) {}  // NOLINT: constants promote implicitly
  Var(double value, int index) : v(value), idx(index) {}

  bool is_constant() const { return idx < 0; }
};

inline double value_of(const Var& x) { return x.v; }

enum class TapeOp : std::uint8_t {
  Leaf,
  Add,
  Sub,
  Mul,
  Div,
  Neg,
  AddC,
  MulC,
  DivC,  // a / c
  CSub,  // c - a
  CDiv,  // c / a
  Exp,
  Log,
  Log1p,
  Sqrt,
  PowC,  // a ^ c
  Abs,
};

/// Linear record of primitive operations with their local partials. Nodes
/// are appended in evaluation order, so a reverse sweep visits them in a
/// valid topological order.
class Tape {
 public:
  struct Node {
    TapeOp op;
    int a;
    int b;
    double c;
    double val;
    double da;
    double db;
  };

  Var variable(double v);
  Var record(TapeOp op, const Var& a, const Var& b, double c);

  void clear() { nodes_.clear(); }
  std::size_t size() const { return nodes_.size(); }
  const std::vector<Node>& nodes() const { return nodes_; }

  double value(int idx) const { return nodes_[static_cast<std::size_t>(idx)].val; }

  /// Overwrites a leaf value; call replay() afterwards to propagate it.
  void set_leaf(int idx, double v);

  /// Recomputes every node value and local partial from the leaves in
  /// recording order.
  void replay();

  /// Reverse sweep. adj must have size() entries; seeds are read from it and
  /// adjoints of all upstream nodes are accumulated in place.
  void backward(std::vector<double>& adj) const;

  /// Adjoints of every node for a single seeded output.
  std::vector<double> gradient(const Var& out) const;

  /// The tape that new Var operations record onto (thread-local).
  static Tape* active();

  /// Makes a tape active for the lifetime of the guard.
  class Scope {
   public:
    explicit Scope(Tape& t);
    ~Scope();
    Scope(const Scope&) = delete;
    Scope& operator=(const Scope&) = delete;

   private:
    Tape* prev_;
  };

 private:
  static void evaluate(Node& n, double va, double vb);
  std::vector<Node> nodes_;
};

Var operator+(const Var& a, const Var& b);
Var operator-(const Var& a, const Var& b);
Var operator*(const Var& a, const Var& b);
Var operator/(const Var& a, const Var& b);
Var operator-(const Var& a);

inline Var& operator+=(Var& a, const Var& b) { return a = a + b; }
inline Var& operator-=(Var& a, const Var& b) { return a = a - b; }
inline Var& operator*=(Var& a, const Var& b) { return a = a * b; }
inline Var& operator/=(Var& a, const Var& b) { return a = a / b; }

inline bool operator<(const Var& a, const Var& b) { return a.v < b.v; }
inline bool operator>(const Var& a, const Var& b) { return a.v > b.v; }
inline bool operator<=(const Var& a, const Var& b) { return a.v <= b.v; }
inline bool operator>=(const Var& a, const Var& b) { return a.v >= b.v; }

Var exp(const Var& a);
Var log(const Var& a);
Var log1p(const Var& a);
Var sqrt(const Var& a);
Var pow(const Var& a, double e);
Var pow(const Var& a, const Var& e);
Var abs(const Var& a);

inline bool isfinite(const Var& a) { return std::isfinite(a.v); }

}  // namespace plastokit
