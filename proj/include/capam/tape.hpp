#pragma once

#include <functional>
#include <vector>

#include "capam/tensor.hpp"

namespace capam {

// Running statistics of one batch-norm layer. Lives outside the tape so the
// same layer can be reused across forward passes; train-mode forwards update
// the running buffers in place (momentum 0.1).
struct BatchNormStats {
  Tensor mean;  // 1xd
  Tensor var;   // 1xd
  explicit BatchNormStats(int d = 0) : mean(1, d, 0.0), var(1, d, 1.0) {}
};

// Eager reverse-mode tape. Operations compute their value immediately and
// record a backward rule; backward() visits the rules once, in reverse
// creation order (creation order is topological by construction).
class Tape {
 public:
  explicit Tape(bool grad_enabled = true) : grad_enabled_(grad_enabled) {}

  int leaf(Tensor value);

  int matmul(int a, int b);
  int transpose(int a);
  int add(int a, int b);                 // same shape
  int sub(int a, int b);
  int mul(int a, int b);                 // elementwise
  int add_rowvec(int a, int bias);       // bias 1xC broadcast over rows
  int pow_elem(int a, int p);            // p >= 1
  int relu(int a);
  int tanh_elem(int a);
  int log_elem(int a);
  int scale(int a, double s);
  int sum(int a);                        // -> 1x1
  int pick(int a, int r, int c);         // -> 1x1
  int concat_cols(const std::vector<int>& parts);
  int concat_rows(const std::vector<int>& parts);
  int slice_cols(int a, int c0, int c1);  // half-open [c0, c1)
  int slice_rows(int a, int r0, int r1);

  // Row-wise softmax over unmasked entries; masked entries are exactly 0.
  // logits must be 1xN. Throws if every entry is masked.
  int masked_softmax(int logits, const std::vector<bool>& mask);

  // Column-wise batch normalization (eps 1e-5). In training mode normalizes
  // by batch statistics and updates `stats` (momentum 0.1); in eval mode
  // normalizes by the running statistics. gamma/beta are 1xd nodes.
  int batch_norm(int x, int gamma, int beta, BatchNormStats* stats, bool training);

  void backward(int root);

  const Tensor& value(int id) const { return nodes_[id].value; }
  const Tensor& grad(int id) const { return nodes_[id].grad; }
  bool grad_enabled() const { return grad_enabled_; }
  int node_count() const { return static_cast<int>(nodes_.size()); }

 private:
  struct Node {
    Tensor value;
    Tensor grad;
    std::function<void()> backprop;  // empty for leaves / grad-disabled tapes
  };

  int push(Tensor value, std::function<void()> backprop);
  Tensor& grad_buf(int id) { return nodes_[id].grad; }

  std::vector<Node> nodes_;
  bool grad_enabled_;
};

}  // namespace capam
