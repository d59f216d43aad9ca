//
// Project agfn - Copyright 2026 The agfn Authors.
// SPDX-License-Identifier: Apache-2.0
//

#ifndef AGFN_AUTODIFF_HPP_
#define AGFN_AUTODIFF_HPP_

#include <cmath>
#include <functional>
#include <limits>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

namespace agfn::ad {

using Mat = Eigen::MatrixXd;

class AutodiffError: public std::logic_error {
public:
  using std::logic_error::logic_error;
};

// A learnable tensor. `group` selects the optimiser settings.
struct Param {
  std::string name;
  Mat value;
  Mat grad;
  int group = 0;
};

class ParamSet {
public:
  Param &add(std::string name, Mat value, int group = 0) {
    for (const Param &p: params_) {
      if (p.name == name)
        throw AutodiffError("duplicate parameter " + name);
    }
    Mat grad = Mat::Zero(value.rows(), value.cols());
    params_.push_back({ std::move(name), std::move(value), std::move(grad),
                        group });
    return params_.back();
  }

  std::vector<Param> &all() { return params_; }
  const std::vector<Param> &all() const { return params_; }
  Param &operator[](std::size_t i) { return params_[i]; }
  const Param &operator[](std::size_t i) const { return params_[i]; }
  std::size_t size() const { return params_.size(); }

  int find(const std::string &name) const {
    for (std::size_t i = 0; i < params_.size(); ++i) {
      if (params_[i].name == name)
        return static_cast<int>(i);
    }
    return -1;
  }

  long count() const {
    long n = 0;
    for (const Param &p: params_)
      n += p.value.size();
    return n;
  }

  void zero_grad() {
    for (Param &p: params_)
      p.grad.setZero();
  }

private:
  std::vector<Param> params_;
};

struct Var {
  int id = -1;
};

// Reverse-mode tape. Every op records its value and a closure that pushes
// the output gradient to its inputs.
class Tape {
public:
  // With grad disabled ops record values only.
  explicit Tape(bool grad = true): grad_(grad) { }

  const Mat &value(Var v) const { return nodes_.at(v.id).value; }
  double scalar(Var v) const { return value(v)(0, 0); }
  const Mat &grad(Var v) const { return nodes_.at(v.id).grad; }
  int size() const { return static_cast<int>(nodes_.size()); }

  Var constant(Mat v) { return push(std::move(v), {}); }

  Var param(Param &p) {
    Var out = push(p.value, {});
    nodes_[out.id].param = &p;
    return out;
  }

  Var matmul(Var a, Var b) {
    check_inner(a, b);
    return push(value(a) * value(b), [a, b](Tape &t, const Mat &g) {
      t.acc(a, g * t.value(b).transpose());
      t.acc(b, t.value(a).transpose() * g);
    });
  }

  Var add(Var a, Var b) {
    check_same(a, b);
    return push(value(a) + value(b), [a, b](Tape &t, const Mat &g) {
      t.acc(a, g);
      t.acc(b, g);
    });
  }

  Var sub(Var a, Var b) {
    check_same(a, b);
    return push(value(a) - value(b), [a, b](Tape &t, const Mat &g) {
      t.acc(a, g);
      t.acc(b, -g);
    });
  }

  // Elementwise product.
  Var mul(Var a, Var b) {
    check_same(a, b);
    return push(value(a).cwiseProduct(value(b)), [a, b](Tape &t, const Mat &g) {
      t.acc(a, g.cwiseProduct(t.value(b)));
      t.acc(b, g.cwiseProduct(t.value(a)));
    });
  }

  Var scale(Var a, double c) {
    return push(value(a) * c, [a, c](Tape &t, const Mat &g) {
      t.acc(a, g * c);
    });
  }

  Var add_scalar(Var a, double c) {
    return push(value(a).array() + c, [a](Tape &t, const Mat &g) {
      t.acc(a, g);
    });
  }

  // a (n x m) plus a broadcast row (1 x m).
  Var add_row(Var a, Var row) {
    if (value(row).rows() != 1 || value(row).cols() != value(a).cols())
      throw AutodiffError("add_row shape mismatch");
    Mat out = value(a).rowwise() + value(row).row(0);
    return push(std::move(out), [a, row](Tape &t, const Mat &g) {
      t.acc(a, g);
      t.acc(row, g.colwise().sum());
    });
  }

  Var relu(Var a) { return leaky_relu(a, 0.0); }

  Var leaky_relu(Var a, double slope) {
    Mat out = value(a).unaryExpr(
        [slope](double x) { return x > 0 ? x : slope * x; });
    return push(std::move(out), [a, slope](Tape &t, const Mat &g) {
      Mat d = t.value(a).unaryExpr(
          [slope](double x) { return x > 0 ? 1.0 : slope; });
      t.acc(a, g.cwiseProduct(d));
    });
  }

  Var square(Var a) {
    return push(value(a).array().square(), [a](Tape &t, const Mat &g) {
      t.acc(a, 2.0 * g.cwiseProduct(t.value(a)));
    });
  }

  Var concat_cols(Var a, Var b) {
    const Mat &x = value(a), &y = value(b);
    if (x.rows() != y.rows())
      throw AutodiffError("concat_cols row mismatch");
    Mat out(x.rows(), x.cols() + y.cols());
    out << x, y;
    const int ca = static_cast<int>(x.cols());
    const int cb = static_cast<int>(y.cols());
    return push(std::move(out), [a, b, ca, cb](Tape &t, const Mat &g) {
      t.acc(a, g.leftCols(ca));
      t.acc(b, g.rightCols(cb));
    });
  }

  Var concat_rows(const std::vector<Var> &parts) {
    if (parts.empty())
      throw AutodiffError("concat_rows of nothing");
    const auto cols = value(parts[0]).cols();
    Eigen::Index rows = 0;
    for (Var p: parts) {
      if (value(p).cols() != cols)
        throw AutodiffError("concat_rows column mismatch");
      rows += value(p).rows();
    }
    Mat out(rows, cols);
    Eigen::Index r = 0;
    for (Var p: parts) {
      out.middleRows(r, value(p).rows()) = value(p);
      r += value(p).rows();
    }
    return push(std::move(out), [parts](Tape &t, const Mat &g) {
      Eigen::Index r = 0;
      for (Var p: parts) {
        const auto n = t.value(p).rows();
        t.acc(p, g.middleRows(r, n));
        r += n;
      }
    });
  }

  Var slice_cols(Var a, int start, int count) {
    if (start < 0 || start + count > value(a).cols())
      throw AutodiffError("slice_cols out of range");
    const auto rows = value(a).rows();
    const auto cols = value(a).cols();
    return push(value(a).middleCols(start, count),
                [a, start, count, rows, cols](Tape &t, const Mat &g) {
                  Mat full = Mat::Zero(rows, cols);
                  full.middleCols(start, count) = g;
                  t.acc(a, full);
                });
  }

  Var gather_rows(Var a, std::vector<int> idx) {
    const Mat &x = value(a);
    Mat out(static_cast<Eigen::Index>(idx.size()), x.cols());
    for (std::size_t i = 0; i < idx.size(); ++i) {
      if (idx[i] < 0 || idx[i] >= x.rows())
        throw AutodiffError("gather_rows index out of range");
      out.row(static_cast<Eigen::Index>(i)) = x.row(idx[i]);
    }
    const auto rows = x.rows();
    return push(std::move(out), [a, idx = std::move(idx), rows](Tape &t,
                                                                const Mat &g) {
      Mat d = Mat::Zero(rows, g.cols());
      for (std::size_t i = 0; i < idx.size(); ++i)
        d.row(idx[i]) += g.row(static_cast<Eigen::Index>(i));
      t.acc(a, d);
    });
  }

  // out.row(idx[i]) += a.row(i); out has n rows.
  Var scatter_add_rows(Var a, std::vector<int> idx, int n) {
    const Mat &x = value(a);
    if (static_cast<Eigen::Index>(idx.size()) != x.rows())
      throw AutodiffError("scatter_add_rows index count mismatch");
    Mat out = Mat::Zero(n, x.cols());
    for (std::size_t i = 0; i < idx.size(); ++i) {
      if (idx[i] < 0 || idx[i] >= n)
        throw AutodiffError("scatter_add_rows index out of range");
      out.row(idx[i]) += x.row(static_cast<Eigen::Index>(i));
    }
    return push(std::move(out), [a, idx = std::move(idx)](Tape &t,
                                                          const Mat &g) {
      Mat d(static_cast<Eigen::Index>(idx.size()), g.cols());
      for (std::size_t i = 0; i < idx.size(); ++i)
        d.row(static_cast<Eigen::Index>(i)) = g.row(idx[i]);
      t.acc(a, d);
    });
  }

  // Row-wise dot product: (n x m), (n x m) -> (n x 1).
  Var row_dot(Var a, Var b) {
    check_same(a, b);
    Mat out = value(a).cwiseProduct(value(b)).rowwise().sum();
    return push(std::move(out), [a, b](Tape &t, const Mat &g) {
      t.acc(a, t.value(b).array().colwise() * g.col(0).array());
      t.acc(b, t.value(a).array().colwise() * g.col(0).array());
    });
  }

  // Scales row i of a by w(i, 0).
  Var scale_rows(Var a, Var w) {
    if (value(w).cols() != 1 || value(w).rows() != value(a).rows())
      throw AutodiffError("scale_rows shape mismatch");
    Mat out = value(a).array().colwise() * value(w).col(0).array();
    return push(std::move(out), [a, w](Tape &t, const Mat &g) {
      t.acc(a, g.array().colwise() * t.value(w).col(0).array());
      t.acc(w, g.cwiseProduct(t.value(a)).rowwise().sum());
    });
  }

  // Softmax of a column within segments.
  Var segment_softmax(Var s, std::vector<int> seg, int nseg) {
    Mat p = segment_softmax_values(value(s), seg, nseg);
    return push(p, [s, seg = std::move(seg), nseg, p](Tape &t, const Mat &g) {
      std::vector<double> dot(nseg, 0.0);
      for (std::size_t i = 0; i < seg.size(); ++i)
        dot[seg[i]] += g(i, 0) * p(i, 0);
      Mat d(p.rows(), 1);
      for (std::size_t i = 0; i < seg.size(); ++i)
        d(i, 0) = p(i, 0) * (g(i, 0) - dot[seg[i]]);
      t.acc(s, d);
    });
  }

  // Log-softmax of a column within segments.
  Var segment_log_softmax(Var s, std::vector<int> seg, int nseg) {
    const Mat &x = value(s);
    check_segments(x, seg, nseg);
    std::vector<double> mx(nseg, -std::numeric_limits<double>::infinity());
    for (std::size_t i = 0; i < seg.size(); ++i)
      mx[seg[i]] = std::max(mx[seg[i]], x(i, 0));
    std::vector<double> z(nseg, 0.0);
    for (std::size_t i = 0; i < seg.size(); ++i)
      z[seg[i]] += std::exp(x(i, 0) - mx[seg[i]]);
    Mat out(x.rows(), 1);
    for (std::size_t i = 0; i < seg.size(); ++i)
      out(i, 0) = x(i, 0) - mx[seg[i]] - std::log(z[seg[i]]);
    Mat lp = out;
    return push(std::move(out), [s, seg = std::move(seg), nseg,
                                 lp = std::move(lp)](Tape &t, const Mat &g) {
      std::vector<double> gs(nseg, 0.0);
      for (std::size_t i = 0; i < seg.size(); ++i)
        gs[seg[i]] += g(i, 0);
      Mat d(lp.rows(), 1);
      for (std::size_t i = 0; i < seg.size(); ++i)
        d(i, 0) = g(i, 0) - std::exp(lp(i, 0)) * gs[seg[i]];
      t.acc(s, d);
    });
  }

  // Column of entries a(r, c).
  Var gather_entries(Var a, std::vector<std::pair<int, int>> at) {
    const Mat &x = value(a);
    Mat out(static_cast<Eigen::Index>(at.size()), 1);
    for (std::size_t i = 0; i < at.size(); ++i) {
      auto [r, c] = at[i];
      if (r < 0 || r >= x.rows() || c < 0 || c >= x.cols())
        throw AutodiffError("gather_entries index out of range");
      out(static_cast<Eigen::Index>(i), 0) = x(r, c);
    }
    const auto rows = x.rows(), cols = x.cols();
    return push(std::move(out), [a, at = std::move(at), rows,
                                 cols](Tape &t, const Mat &g) {
      Mat d = Mat::Zero(rows, cols);
      for (std::size_t i = 0; i < at.size(); ++i)
        d(at[i].first, at[i].second) += g(static_cast<Eigen::Index>(i), 0);
      t.acc(a, d);
    });
  }

  // Sum of all entries, as 1 x 1.
  Var sum(Var a) {
    const auto rows = value(a).rows(), cols = value(a).cols();
    Mat out(1, 1);
    out(0, 0) = value(a).sum();
    return push(std::move(out), [a, rows, cols](Tape &t, const Mat &g) {
      t.acc(a, Mat::Constant(rows, cols, g(0, 0)));
    });
  }

  // Seeds d loss = 1 and accumulates into the parameters on the tape.
  void backward(Var loss) {
    if (!grad_)
      throw AutodiffError("backward on a no-grad tape");
    if (value(loss).size() != 1)
      throw AutodiffError("backward needs a scalar");
    nodes_[loss.id].grad = Mat::Ones(1, 1);
    for (int i = loss.id; i >= 0; --i) {
      Node &n = nodes_[i];
      if (n.grad.size() == 0)
        continue;
      if (n.back)
        n.back(*this, n.grad);
      if (n.param != nullptr)
        n.param->grad += n.grad;
    }
  }

  static Mat segment_softmax_values(const Mat &x, const std::vector<int> &seg,
                                    int nseg) {
    check_segments(x, seg, nseg);
    std::vector<double> mx(nseg, -std::numeric_limits<double>::infinity());
    for (std::size_t i = 0; i < seg.size(); ++i)
      mx[seg[i]] = std::max(mx[seg[i]], x(i, 0));
    Mat p(x.rows(), 1);
    std::vector<double> z(nseg, 0.0);
    for (std::size_t i = 0; i < seg.size(); ++i) {
      p(i, 0) = std::exp(x(i, 0) - mx[seg[i]]);
      z[seg[i]] += p(i, 0);
    }
    for (std::size_t i = 0; i < seg.size(); ++i)
      p(i, 0) /= z[seg[i]];
    return p;
  }

private:
  using Backward = std::function<void(Tape &, const Mat &)>;

  struct Node {
    Mat value;
    Mat grad;
    Backward back;
    Param *param = nullptr;
  };

  Var push(Mat value, Backward back) {
    nodes_.push_back({ std::move(value), Mat(), grad_ ? std::move(back)
                                                       : Backward {} });
    return { static_cast<int>(nodes_.size()) - 1 };
  }

  void acc(Var v, Mat g) {
    Node &n = nodes_[v.id];
    if (n.grad.size() == 0)
      n.grad = std::move(g);
    else
      n.grad += g;
  }

  void check_same(Var a, Var b) const {
    if (value(a).rows() != value(b).rows()
        || value(a).cols() != value(b).cols())
      throw AutodiffError("shape mismatch");
  }

  void check_inner(Var a, Var b) const {
    if (value(a).cols() != value(b).rows())
      throw AutodiffError("matmul inner dimension mismatch");
  }

  static void check_segments(const Mat &x, const std::vector<int> &seg,
                             int nseg) {
    if (x.cols() != 1 || static_cast<Eigen::Index>(seg.size()) != x.rows())
      throw AutodiffError("segment op needs a column with one id per row");
    for (int s: seg) {
      if (s < 0 || s >= nseg)
        throw AutodiffError("segment id out of range");
    }
  }

  bool grad_;
  std::vector<Node> nodes_;
};

}  // namespace agfn::ad

#endif  // AGFN_AUTODIFF_HPP_
