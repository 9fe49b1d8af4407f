#include "capam/tape.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace capam {

namespace {
constexpr double kBnEps = 1e-5;
constexpr double kBnMomentum = 0.1;
}  // namespace

int Tape::push(Tensor value, std::function<void()> backprop) {
  Node n;
  n.value = std::move(value);
  n.grad = Tensor(n.value.rows, n.value.cols, 0.0);
  if (grad_enabled_) n.backprop = std::move(backprop);
  nodes_.push_back(std::move(n));
  return static_cast<int>(nodes_.size()) - 1;
}

int Tape::leaf(Tensor value) { return push(std::move(value), {}); }

int Tape::matmul(int a, int b) {
  Tensor out = matmul_val(value(a), value(b));
  int id = push(std::move(out), {});
  if (grad_enabled_) {
    nodes_[id].backprop = [this, a, b, id]() {
      const Tensor& g = grad(id);
      // dA += dC * B^T, dB += A^T * dC
      matmul_acc(g, transposed(value(b)), grad_buf(a));
      matmul_acc(transposed(value(a)), g, grad_buf(b));
    };
  }
  return id;
}

int Tape::transpose(int a) {
  Tensor out = transposed(value(a));
  int id = push(std::move(out), {});
  if (grad_enabled_) {
    nodes_[id].backprop = [this, a, id]() {
      Tensor gt = transposed(grad(id));
      Tensor& ga = grad_buf(a);
      for (int i = 0; i < ga.size(); ++i) ga.data[i] += gt.data[i];
    };
  }
  return id;
}

int Tape::add(int a, int b) {
  const Tensor& av = value(a);
  const Tensor& bv = value(b);
  if (!av.same_shape(bv))
    throw std::invalid_argument("add: shape mismatch " + av.shape_str() + " vs " +
                                bv.shape_str());
  Tensor out = av;
  for (int i = 0; i < out.size(); ++i) out.data[i] += bv.data[i];
  int id = push(std::move(out), {});
  if (grad_enabled_) {
    nodes_[id].backprop = [this, a, b, id]() {
      const Tensor& g = grad(id);
      Tensor& ga = grad_buf(a);
      Tensor& gb = grad_buf(b);
      for (int i = 0; i < g.size(); ++i) {
        ga.data[i] += g.data[i];
        gb.data[i] += g.data[i];
      }
    };
  }
  return id;
}

int Tape::sub(int a, int b) {
  const Tensor& av = value(a);
  const Tensor& bv = value(b);
  if (!av.same_shape(bv))
    throw std::invalid_argument("sub: shape mismatch " + av.shape_str() + " vs " +
                                bv.shape_str());
  Tensor out = av;
  for (int i = 0; i < out.size(); ++i) out.data[i] -= bv.data[i];
  int id = push(std::move(out), {});
  if (grad_enabled_) {
    nodes_[id].backprop = [this, a, b, id]() {
      const Tensor& g = grad(id);
      Tensor& ga = grad_buf(a);
      Tensor& gb = grad_buf(b);
      for (int i = 0; i < g.size(); ++i) {
        ga.data[i] += g.data[i];
        gb.data[i] -= g.data[i];
      }
    };
  }
  return id;
}

int Tape::mul(int a, int b) {
  const Tensor& av = value(a);
  const Tensor& bv = value(b);
  if (!av.same_shape(bv))
    throw std::invalid_argument("mul: shape mismatch " + av.shape_str() + " vs " +
                                bv.shape_str());
  Tensor out = av;
  for (int i = 0; i < out.size(); ++i) out.data[i] *= bv.data[i];
  int id = push(std::move(out), {});
  if (grad_enabled_) {
    nodes_[id].backprop = [this, a, b, id]() {
      const Tensor& g = grad(id);
      const Tensor& av2 = value(a);
      const Tensor& bv2 = value(b);
      Tensor& ga = grad_buf(a);
      Tensor& gb = grad_buf(b);
      for (int i = 0; i < g.size(); ++i) {
        ga.data[i] += g.data[i] * bv2.data[i];
        gb.data[i] += g.data[i] * av2.data[i];
      }
    };
  }
  return id;
}

int Tape::add_rowvec(int a, int bias) {
  const Tensor& av = value(a);
  const Tensor& bv = value(bias);
  if (bv.rows != 1 || bv.cols != av.cols)
    throw std::invalid_argument("add_rowvec: bias " + bv.shape_str() +
                                " incompatible with " + av.shape_str());
  Tensor out = av;
  for (int i = 0; i < out.rows; ++i)
    for (int j = 0; j < out.cols; ++j) out.at(i, j) += bv.at(0, j);
  int id = push(std::move(out), {});
  if (grad_enabled_) {
    nodes_[id].backprop = [this, a, bias, id]() {
      const Tensor& g = grad(id);
      Tensor& ga = grad_buf(a);
      Tensor& gb = grad_buf(bias);
      for (int i = 0; i < g.rows; ++i)
        for (int j = 0; j < g.cols; ++j) {
          ga.at(i, j) += g.at(i, j);
          gb.at(0, j) += g.at(i, j);
        }
    };
  }
  return id;
}

int Tape::pow_elem(int a, int p) {
  if (p < 1) throw std::invalid_argument("pow_elem: p must be >= 1, got " + std::to_string(p));
  const Tensor& av = value(a);
  Tensor out = av;
  for (double& v : out.data) v = std::pow(v, p);
  int id = push(std::move(out), {});
  if (grad_enabled_) {
    nodes_[id].backprop = [this, a, p, id]() {
      const Tensor& g = grad(id);
      const Tensor& av2 = value(a);
      Tensor& ga = grad_buf(a);
      for (int i = 0; i < g.size(); ++i)
        ga.data[i] += g.data[i] * p * std::pow(av2.data[i], p - 1);
    };
  }
  return id;
}

int Tape::relu(int a) {
  Tensor out = value(a);
  for (double& v : out.data) v = v > 0.0 ? v : 0.0;
  int id = push(std::move(out), {});
  if (grad_enabled_) {
    nodes_[id].backprop = [this, a, id]() {
      const Tensor& g = grad(id);
      const Tensor& av = value(a);
      Tensor& ga = grad_buf(a);
      for (int i = 0; i < g.size(); ++i)
        if (av.data[i] > 0.0) ga.data[i] += g.data[i];
    };
  }
  return id;
}

int Tape::tanh_elem(int a) {
  Tensor out = value(a);
  for (double& v : out.data) v = std::tanh(v);
  int id = push(std::move(out), {});
  if (grad_enabled_) {
    nodes_[id].backprop = [this, a, id]() {
      const Tensor& g = grad(id);
      const Tensor& ov = value(id);
      Tensor& ga = grad_buf(a);
      for (int i = 0; i < g.size(); ++i)
        ga.data[i] += g.data[i] * (1.0 - ov.data[i] * ov.data[i]);
    };
  }
  return id;
}

int Tape::log_elem(int a) {
  Tensor out = value(a);
  for (double& v : out.data) v = std::log(v);
  int id = push(std::move(out), {});
  if (grad_enabled_) {
    nodes_[id].backprop = [this, a, id]() {
      const Tensor& g = grad(id);
      const Tensor& av = value(a);
      Tensor& ga = grad_buf(a);
      for (int i = 0; i < g.size(); ++i) ga.data[i] += g.data[i] / av.data[i];
    };
  }
  return id;
}

int Tape::scale(int a, double s) {
  Tensor out = value(a);
  for (double& v : out.data) v *= s;
  int id = push(std::move(out), {});
  if (grad_enabled_) {
    nodes_[id].backprop = [this, a, s, id]() {
      const Tensor& g = grad(id);
      Tensor& ga = grad_buf(a);
      for (int i = 0; i < g.size(); ++i) ga.data[i] += s * g.data[i];
    };
  }
  return id;
}

int Tape::sum(int a) {
  double total = 0.0;
  for (double v : value(a).data) total += v;
  int id = push(Tensor(1, 1, total), {});
  if (grad_enabled_) {
    nodes_[id].backprop = [this, a, id]() {
      const double g = grad(id).data[0];
      Tensor& ga = grad_buf(a);
      for (double& v : ga.data) v += g;
    };
  }
  return id;
}

int Tape::pick(int a, int r, int c) {
  const Tensor& av = value(a);
  if (r < 0 || r >= av.rows || c < 0 || c >= av.cols)
    throw std::invalid_argument("pick: index out of range");
  int id = push(Tensor(1, 1, av.at(r, c)), {});
  if (grad_enabled_) {
    nodes_[id].backprop = [this, a, r, c, id]() {
      grad_buf(a).at(r, c) += grad(id).data[0];
    };
  }
  return id;
}

int Tape::concat_cols(const std::vector<int>& parts) {
  if (parts.empty()) throw std::invalid_argument("concat_cols: empty");
  int rows = value(parts[0]).rows;
  int cols = 0;
  for (int p : parts) {
    if (value(p).rows != rows)
      throw std::invalid_argument("concat_cols: row mismatch");
    cols += value(p).cols;
  }
  Tensor out(rows, cols);
  int off = 0;
  for (int p : parts) {
    const Tensor& v = value(p);
    for (int i = 0; i < rows; ++i)
      for (int j = 0; j < v.cols; ++j) out.at(i, off + j) = v.at(i, j);
    off += v.cols;
  }
  int id = push(std::move(out), {});
  if (grad_enabled_) {
    std::vector<int> ps = parts;
    nodes_[id].backprop = [this, ps, id]() {
      const Tensor& g = grad(id);
      int o = 0;
      for (int p : ps) {
        Tensor& gp = grad_buf(p);
        for (int i = 0; i < gp.rows; ++i)
          for (int j = 0; j < gp.cols; ++j) gp.at(i, j) += g.at(i, o + j);
        o += gp.cols;
      }
    };
  }
  return id;
}

int Tape::concat_rows(const std::vector<int>& parts) {
  if (parts.empty()) throw std::invalid_argument("concat_rows: empty");
  int cols = value(parts[0]).cols;
  int rows = 0;
  for (int p : parts) {
    if (value(p).cols != cols)
      throw std::invalid_argument("concat_rows: column mismatch");
    rows += value(p).rows;
  }
  Tensor out(rows, cols);
  int off = 0;
  for (int p : parts) {
    const Tensor& v = value(p);
    for (int i = 0; i < v.rows; ++i)
      for (int j = 0; j < cols; ++j) out.at(off + i, j) = v.at(i, j);
    off += v.rows;
  }
  int id = push(std::move(out), {});
  if (grad_enabled_) {
    std::vector<int> ps = parts;
    nodes_[id].backprop = [this, ps, id]() {
      const Tensor& g = grad(id);
      int o = 0;
      for (int p : ps) {
        Tensor& gp = grad_buf(p);
        for (int i = 0; i < gp.rows; ++i)
          for (int j = 0; j < gp.cols; ++j) gp.at(i, j) += g.at(o + i, j);
        o += gp.rows;
      }
    };
  }
  return id;
}

int Tape::slice_cols(int a, int c0, int c1) {
  const Tensor& av = value(a);
  if (c0 < 0 || c1 > av.cols || c0 >= c1)
    throw std::invalid_argument("slice_cols: bad range");
  Tensor out(av.rows, c1 - c0);
  for (int i = 0; i < av.rows; ++i)
    for (int j = c0; j < c1; ++j) out.at(i, j - c0) = av.at(i, j);
  int id = push(std::move(out), {});
  if (grad_enabled_) {
    nodes_[id].backprop = [this, a, c0, id]() {
      const Tensor& g = grad(id);
      Tensor& ga = grad_buf(a);
      for (int i = 0; i < g.rows; ++i)
        for (int j = 0; j < g.cols; ++j) ga.at(i, c0 + j) += g.at(i, j);
    };
  }
  return id;
}

int Tape::slice_rows(int a, int r0, int r1) {
  const Tensor& av = value(a);
  if (r0 < 0 || r1 > av.rows || r0 >= r1)
    throw std::invalid_argument("slice_rows: bad range");
  Tensor out(r1 - r0, av.cols);
  for (int i = r0; i < r1; ++i)
    for (int j = 0; j < av.cols; ++j) out.at(i - r0, j) = av.at(i, j);
  int id = push(std::move(out), {});
  if (grad_enabled_) {
    nodes_[id].backprop = [this, a, r0, id]() {
      const Tensor& g = grad(id);
      Tensor& ga = grad_buf(a);
      for (int i = 0; i < g.rows; ++i)
        for (int j = 0; j < g.cols; ++j) ga.at(r0 + i, j) += g.at(i, j);
    };
  }
  return id;
}

int Tape::masked_softmax(int logits, const std::vector<bool>& mask) {
  const Tensor& lv = value(logits);
  if (lv.rows != 1)
    throw std::invalid_argument("masked_softmax: expected row vector, got " + lv.shape_str());
  if (static_cast<int>(mask.size()) != lv.cols)
    throw std::invalid_argument("masked_softmax: mask length mismatch");
  double mx = -std::numeric_limits<double>::infinity();
  for (int j = 0; j < lv.cols; ++j)
    if (mask[j]) mx = std::max(mx, lv.data[j]);
  if (!std::isfinite(mx))
    throw std::runtime_error("masked_softmax: no feasible entry (all masked)");
  Tensor out(1, lv.cols, 0.0);
  double denom = 0.0;
  for (int j = 0; j < lv.cols; ++j) {
    if (!mask[j]) continue;
    out.data[j] = std::exp(lv.data[j] - mx);
    denom += out.data[j];
  }
  for (int j = 0; j < lv.cols; ++j)
    if (mask[j]) out.data[j] /= denom;
  int id = push(std::move(out), {});
  if (grad_enabled_) {
    std::vector<bool> m = mask;
    nodes_[id].backprop = [this, logits, m, id]() {
      const Tensor& g = grad(id);
      const Tensor& y = value(id);
      Tensor& gl = grad_buf(logits);
      double dot = 0.0;
      for (int j = 0; j < y.cols; ++j)
        if (m[j]) dot += g.data[j] * y.data[j];
      for (int j = 0; j < y.cols; ++j)
        if (m[j]) gl.data[j] += y.data[j] * (g.data[j] - dot);
    };
  }
  return id;
}

int Tape::batch_norm(int x, int gamma, int beta, BatchNormStats* stats, bool training) {
  const Tensor& xv = value(x);
  const Tensor& gv = value(gamma);
  const Tensor& bv = value(beta);
  const int n = xv.rows;
  const int d = xv.cols;
  if (n < 1) throw std::invalid_argument("batch_norm: need at least one row");
  if (gv.rows != 1 || gv.cols != d || bv.rows != 1 || bv.cols != d)
    throw std::invalid_argument("batch_norm: gamma/beta must be 1x" + std::to_string(d));
  if (stats == nullptr || stats->mean.cols != d)
    throw std::invalid_argument("batch_norm: running stats width mismatch");

  Tensor mean(1, d), var(1, d);
  if (training) {
    for (int j = 0; j < d; ++j) {
      double m = 0.0;
      for (int i = 0; i < n; ++i) m += xv.at(i, j);
      m /= n;
      double v = 0.0;
      for (int i = 0; i < n; ++i) {
        const double c = xv.at(i, j) - m;
        v += c * c;
      }
      v /= n;
      mean.at(0, j) = m;
      var.at(0, j) = v;
      stats->mean.at(0, j) = (1.0 - kBnMomentum) * stats->mean.at(0, j) + kBnMomentum * m;
      stats->var.at(0, j) = (1.0 - kBnMomentum) * stats->var.at(0, j) + kBnMomentum * v;
    }
  } else {
    mean = stats->mean;
    var = stats->var;
  }

  Tensor xhat(n, d), out(n, d);
  for (int j = 0; j < d; ++j) {
    const double inv = 1.0 / std::sqrt(var.at(0, j) + kBnEps);
    for (int i = 0; i < n; ++i) {
      xhat.at(i, j) = (xv.at(i, j) - mean.at(0, j)) * inv;
      out.at(i, j) = gv.at(0, j) * xhat.at(i, j) + bv.at(0, j);
    }
  }
  int id = push(std::move(out), {});
  if (grad_enabled_) {
    nodes_[id].backprop = [this, x, gamma, beta, id, xhat, var, training]() {
      const Tensor& g = grad(id);
      const Tensor& gv2 = value(gamma);
      const int n2 = g.rows;
      const int d2 = g.cols;
      Tensor& gx = grad_buf(x);
      Tensor& gg = grad_buf(gamma);
      Tensor& gb = grad_buf(beta);
      for (int j = 0; j < d2; ++j) {
        const double inv = 1.0 / std::sqrt(var.at(0, j) + kBnEps);
        double sum_g = 0.0, sum_gx = 0.0;
        for (int i = 0; i < n2; ++i) {
          sum_g += g.at(i, j);
          sum_gx += g.at(i, j) * xhat.at(i, j);
        }
        gg.at(0, j) += sum_gx;
        gb.at(0, j) += sum_g;
        if (training) {
          for (int i = 0; i < n2; ++i) {
            const double t = g.at(i, j) - sum_g / n2 - xhat.at(i, j) * sum_gx / n2;
            gx.at(i, j) += gv2.at(0, j) * inv * t;
          }
        } else {
          for (int i = 0; i < n2; ++i) gx.at(i, j) += gv2.at(0, j) * inv * g.at(i, j);
        }
      }
    };
  }
  return id;
}

void Tape::backward(int root) {
  if (!grad_enabled_) throw std::logic_error("backward on grad-disabled tape");
  const Tensor& rv = value(root);
  if (rv.rows != 1 || rv.cols != 1)
    throw std::invalid_argument("backward: root must be scalar, got " + rv.shape_str());
  for (Node& n : nodes_) std::fill(n.grad.data.begin(), n.grad.data.end(), 0.0);
  nodes_[root].grad.data[0] = 1.0;
  for (int i = root; i >= 0; --i)
    if (nodes_[i].backprop) nodes_[i].backprop();
}

}  // namespace capam
