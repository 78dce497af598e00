#pragma once

#include <cstddef>
#include <functional>
#include <limits>
#include <string>
#include <unordered_map>
#include <vector>

#include "recsql/core/matrix.hpp"
#include "recsql/core/param_store.hpp"

namespace recsql::core {

/// Handle to a value recorded on a Tape.
struct Var {
  static constexpr std::size_t npos = std::numeric_limits<std::size_t>::max();
  std::size_t id = npos;
  bool valid() const noexcept { return id != npos; }
};

/// Reverse-mode differentiation record. Nodes are appended in evaluation
/// order, so a reverse sweep visits every node after all its consumers.
///
/// Parameter nodes alias the ParamStore matrices instead of copying them; the
/// store must outlive the tape and must not be mutated while it is in use.
class Tape {
 public:
  using Backward = std::function<void(Tape&, std::size_t self)>;

  explicit Tape(const ParamStore* params = nullptr) : params_(params) {}

  Tape(const Tape&) = delete;
  Tape& operator=(const Tape&) = delete;

  Var constant(Matrix value);
  /// Leaf bound to a stored parameter; repeated calls return the same node.
  Var param(const std::string& name);

  /// Appends an op result. `backward` is kept only if some input needs a gradient.
  Var record(Matrix value, std::initializer_list<Var> inputs, Backward backward);
  Var record(Matrix value, const std::vector<Var>& inputs, Backward backward);

  const Matrix& value(Var v) const;
  double scalar(Var v) const { return value(v)[0]; }
  bool requires_grad(Var v) const { return nodes_[v.id].requires_grad; }

  /// Gradient buffer for `v`, zero-initialized on first access.
  Matrix& grad(Var v);
  Matrix& grad(std::size_t id) { return grad(Var{id}); }

  /// Seeds d(loss)/d(loss) = 1 and sweeps the tape in reverse.
  void backward(Var loss);

  /// Gradient of every parameter that was bound on this tape. Parameters that
  /// participated without reaching the loss get an all-zero matrix.
  Gradients parameter_gradients() const;

  const ParamStore* params() const noexcept { return params_; }

  /// With gradients disabled, parameters bound afterwards are plain leaves and
  /// no backward closures are kept (inference).
  void set_grad_enabled(bool enabled) noexcept { grad_enabled_ = enabled; }
  std::size_t size() const noexcept { return nodes_.size(); }

 private:
  struct Node {
    Matrix owned;
    const Matrix* external = nullptr;
    Matrix grad;
    Backward backward;
    bool requires_grad = false;
  };

  const ParamStore* params_;
  bool grad_enabled_ = true;
  std::vector<Node> nodes_;
  std::unordered_map<std::string, std::size_t> param_nodes_;
};

}  // namespace recsql::core
