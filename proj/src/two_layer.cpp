#include "gfucb/two_layer.hpp"

#include "gfucb/errors.hpp"

namespace gfucb {

Batch make_batch(const SampleLog& log) {
  Batch b;
  const int n = static_cast<int>(log.size());
  const int d = log.empty() ? 0 : static_cast<int>(log.task_samples(0).front().x.size());
  b.X.resize(d, n);
  b.task.resize(static_cast<std::size_t>(n));
  b.target.resize(n);
  int col = 0;
  for (int i = 0; i < log.tasks(); ++i) {
    for (const auto& s : log.task_samples(i)) {
      b.X.col(col) = s.x;
      b.task[static_cast<std::size_t>(col)] = i;
      b.target(col) = s.y;
      ++col;
    }
  }
  return b;
}

TwoLayerNet::TwoLayerNet(int input_dim, int hidden, int k, int tasks, ValueRange range)
    : d_(input_dim), h_(hidden), k_(k), tasks_(tasks), range_(range) {
  off_b1_ = h_ * d_;
  off_w2_ = off_b1_ + h_;
  off_b2_ = off_w2_ + k_ * h_;
  off_heads_ = off_b2_ + k_;
  total_ = off_heads_ + k_ * tasks_;
}

TwoLayerNet::TwoLayerNet(const MultiheadFunction& like)
    : TwoLayerNet(std::get<TwoLayerRep>(like.rep()).input_dim(),
                  std::get<TwoLayerRep>(like.rep()).hidden(),
                  std::get<TwoLayerRep>(like.rep()).output_dim(), like.tasks(), like.range()) {}

Vector TwoLayerNet::flatten(const TwoLayerRep& rep, const Matrix& heads) const {
  if (rep.input_dim() != d_ || rep.hidden() != h_ || rep.output_dim() != k_ ||
      heads.rows() != k_ || heads.cols() != tasks_) {
    throw InputError("TwoLayerNet::flatten: shape mismatch");
  }
  Vector p(total_);
  Eigen::Map<Matrix>(p.data(), h_, d_) = rep.W1;
  p.segment(off_b1_, h_) = rep.b1;
  Eigen::Map<Matrix>(p.data() + off_w2_, k_, h_) = rep.W2;
  p.segment(off_b2_, k_) = rep.b2;
  Eigen::Map<Matrix>(p.data() + off_heads_, k_, tasks_) = heads;
  return p;
}

Vector TwoLayerNet::flatten(const MultiheadFunction& f) const {
  return flatten(std::get<TwoLayerRep>(f.rep()), f.heads());
}

MultiheadFunction TwoLayerNet::unflatten(const Vector& p) const {
  TwoLayerRep rep;
  rep.W1 = Eigen::Map<const Matrix>(p.data(), h_, d_);
  rep.b1 = p.segment(off_b1_, h_);
  rep.W2 = Eigen::Map<const Matrix>(p.data() + off_w2_, k_, h_);
  rep.b2 = p.segment(off_b2_, k_);
  Matrix heads = Eigen::Map<const Matrix>(p.data() + off_heads_, k_, tasks_);
  return MultiheadFunction(std::make_shared<const Representation>(std::move(rep)),
                           std::move(heads), range_);
}

void TwoLayerNet::forward(const Vector& p, const Batch& batch, Cache& c) const {
  const Eigen::Map<const Matrix> W1(p.data(), h_, d_);
  const auto b1 = p.segment(off_b1_, h_);
  const Eigen::Map<const Matrix> W2(p.data() + off_w2_, k_, h_);
  const auto b2 = p.segment(off_b2_, k_);
  const Eigen::Map<const Matrix> H(p.data() + off_heads_, k_, tasks_);
  const Eigen::Index n = batch.X.cols();

  c.Z1.noalias() = W1 * batch.X;
  c.Z1.colwise() += b1;
  c.A1 = c.Z1.cwiseMax(0.0);
  c.Phi.noalias() = W2 * c.A1;
  c.Phi.colwise() += b2;
  c.norm = c.Phi.colwise().norm().transpose();
  c.raw.resize(n);
  for (Eigen::Index j = 0; j < n; ++j) {
    if (c.norm(j) > 1.0) c.Phi.col(j) /= c.norm(j);
    c.raw(j) = c.Phi.col(j).dot(H.col(batch.task[static_cast<std::size_t>(j)]));
  }
}

void TwoLayerNet::backward(const Vector& p, const Batch& batch, const Cache& c,
                           const Vector& coeff, Vector& grad) const {
  const Eigen::Map<const Matrix> W2(p.data() + off_w2_, k_, h_);
  const Eigen::Map<const Matrix> H(p.data() + off_heads_, k_, tasks_);
  Eigen::Map<Matrix> gW1(grad.data(), h_, d_);
  auto gb1 = grad.segment(off_b1_, h_);
  Eigen::Map<Matrix> gW2(grad.data() + off_w2_, k_, h_);
  auto gb2 = grad.segment(off_b2_, k_);
  Eigen::Map<Matrix> gH(grad.data() + off_heads_, k_, tasks_);
  const Eigen::Index n = batch.X.cols();

  Matrix dZ2(k_, n);
  for (Eigen::Index j = 0; j < n; ++j) {
    const double cj = coeff(j);
    if (cj == 0.0) {
      dZ2.col(j).setZero();
      continue;
    }
    const int t = batch.task[static_cast<std::size_t>(j)];
    gH.col(t) += cj * c.Phi.col(j);
    if (c.norm(j) > 1.0) {
      // d(z/|z|) applied to cj * w
      const double proj = c.Phi.col(j).dot(H.col(t));
      dZ2.col(j) = cj * (H.col(t) - proj * c.Phi.col(j)) / c.norm(j);
    } else {
      dZ2.col(j) = cj * H.col(t);
    }
  }
  gW2.noalias() += dZ2 * c.A1.transpose();
  gb2 += dZ2.rowwise().sum();
  Matrix dZ1 = W2.transpose() * dZ2;
  dZ1.array() *= (c.Z1.array() > 0.0).cast<double>();
  gW1.noalias() += dZ1 * batch.X.transpose();
  gb1 += dZ1.rowwise().sum();
}

void TwoLayerNet::project_heads(Vector& p, double bound) const {
  Eigen::Map<Matrix> H(p.data() + off_heads_, k_, tasks_);
  for (Eigen::Index i = 0; i < H.cols(); ++i) {
    const double n = H.col(i).norm();
    if (n > bound) H.col(i) *= bound / n;
  }
}

}  // namespace gfucb
