#include "byzsim/problem.hpp"

#include "byzsim/numerics.hpp"

#include <Eigen/Cholesky>
#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>
#include <sstream>
#include <stdexcept>

namespace byzsim {

namespace {

double softplus(double t) {
  // log(1 + exp(t)) without overflow for large |t|.
  return std::max(t, 0.0) + std::log1p(std::exp(-std::abs(t)));
}

double sigmoid(double t) {
  if (t >= 0.0) return 1.0 / (1.0 + std::exp(-t));
  const double e = std::exp(t);
  return e / (1.0 + e);
}

[[noreturn]] void parse_fail(std::size_t line_no, const std::string& message) {
  std::ostringstream os;
  os << "parse_libsvm: line " << line_no << ": " << message;
  throw std::runtime_error(os.str());
}

}  // namespace

void Dataset::validate() const {
  if (features.rows() < 1) throw std::invalid_argument("Dataset: needs at least one sample");
  if (labels.size() != features.rows())
    throw std::invalid_argument("Dataset: label count mismatch");
  for (Index j = 0; j < labels.size(); ++j) {
    if (labels[j] != 0.0 && labels[j] != 1.0)
      throw std::invalid_argument("Dataset: labels must be 0 or 1");
  }
}

Dataset parse_libsvm(std::istream& in) {
  struct Row {
    double label;
    std::vector<std::pair<Index, double>> entries;
  };
  std::vector<Row> rows;
  Index dimension = 0;

  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    // strip trailing CR and comments
    if (const auto hash = line.find('#'); hash != std::string::npos) line.resize(hash);
    while (!line.empty() && (line.back() == '\r' || line.back() == ' ' || line.back() == '\t'))
      line.pop_back();
    if (line.empty()) continue;

    std::istringstream ls(line);
    std::string token;
    if (!(ls >> token)) continue;

    Row row;
    try {
      std::size_t used = 0;
      const double raw = std::stod(token, &used);
      if (used != token.size()) parse_fail(line_no, "non-numeric label '" + token + "'");
      if (raw == -1.0 || raw == 0.0) {
        row.label = 0.0;
      } else if (raw == 1.0) {
        row.label = 1.0;
      } else {
        parse_fail(line_no, "label must be one of -1, 0, +1");
      }
    } catch (const std::invalid_argument&) {
      parse_fail(line_no, "non-numeric label '" + token + "'");
    }

    Index prev_index = 0;
    while (ls >> token) {
      const auto colon = token.find(':');
      if (colon == std::string::npos || colon == 0 || colon + 1 == token.size())
        parse_fail(line_no, "malformed feature '" + token + "'");
      Index idx = 0;
      double val = 0.0;
      try {
        std::size_t used = 0;
        idx = static_cast<Index>(std::stoll(token.substr(0, colon), &used));
        if (used != colon) parse_fail(line_no, "malformed feature index in '" + token + "'");
        used = 0;
        const std::string vtext = token.substr(colon + 1);
        val = std::stod(vtext, &used);
        if (used != vtext.size()) parse_fail(line_no, "non-numeric value in '" + token + "'");
      } catch (const std::invalid_argument&) {
        parse_fail(line_no, "malformed feature '" + token + "'");
      } catch (const std::out_of_range&) {
        parse_fail(line_no, "out-of-range number in '" + token + "'");
      }
      if (idx < 1) parse_fail(line_no, "feature indices are 1-based");
      if (idx == prev_index) parse_fail(line_no, "duplicate feature index");
      if (idx < prev_index) parse_fail(line_no, "feature indices must be strictly increasing");
      prev_index = idx;
      dimension = std::max(dimension, idx);
      row.entries.emplace_back(idx - 1, val);
    }
    rows.push_back(std::move(row));
  }

  if (rows.empty()) throw std::runtime_error("parse_libsvm: no samples");

  Dataset out;
  out.features = Matrix::Zero(static_cast<Index>(rows.size()), dimension);
  out.labels = Vector::Zero(static_cast<Index>(rows.size()));
  for (std::size_t r = 0; r < rows.size(); ++r) {
    out.labels[static_cast<Index>(r)] = rows[r].label;
    for (const auto& [idx, val] : rows[r].entries)
      out.features(static_cast<Index>(r), idx) = val;
  }
  out.validate();
  return out;
}

Dataset parse_libsvm_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("parse_libsvm: cannot open '" + path + "'");
  return parse_libsvm(in);
}

void write_libsvm(const Dataset& ds, std::ostream& out) {
  for (Index r = 0; r < ds.sample_count(); ++r) {
    out << (ds.labels[r] == 1.0 ? "+1" : "-1");
    for (Index c = 0; c < ds.dimension(); ++c) {
      const double v = ds.features(r, c);
      if (v != 0.0) {
        char buf[48];
        std::snprintf(buf, sizeof(buf), " %lld:%.17g", static_cast<long long>(c + 1), v);
        out << buf;
      }
    }
    out << '\n';
  }
}

Dataset synthetic_dataset(Index samples, Index dimension, RngStream& rng,
                          double separator_scale) {
  if (samples < 1 || dimension < 1)
    throw std::invalid_argument("synthetic_dataset: need positive sizes");
  Dataset ds;
  ds.features.resize(samples, dimension);
  ds.labels.resize(samples);
  const double coord_scale = 1.0 / std::sqrt(static_cast<double>(dimension));
  Vector separator = rng.gaussian_vector(dimension);
  separator *= separator_scale / std::max(separator.norm(), 1e-12);
  for (Index r = 0; r < samples; ++r) {
    for (Index c = 0; c < dimension; ++c) ds.features(r, c) = coord_scale * rng.normal();
    const double p = sigmoid(separator.dot(ds.features.row(r)));
    ds.labels[r] = rng.uniform() < p ? 1.0 : 0.0;
  }
  return ds;
}

LogisticObjective::LogisticObjective(std::shared_ptr<const Dataset> data, double eta)
    : data_(std::move(data)), eta_(eta) {
  if (!data_) throw std::invalid_argument("LogisticObjective: null dataset");
  data_->validate();
  if (eta_ < 0.0) throw std::invalid_argument("LogisticObjective: eta must be nonnegative");
}

double LogisticObjective::value(const Vector& x) const {
  if (x.size() != dimension()) throw std::invalid_argument("value: dimension mismatch");
  const Vector scores = data_->features * x;
  NeumaierSum acc;
  for (Index j = 0; j < scores.size(); ++j) {
    const double y = data_->labels[j];
    acc.add(y * softplus(-scores[j]) + (1.0 - y) * softplus(scores[j]));
  }
  return acc.value() / static_cast<double>(sample_count()) + eta_ * x.squaredNorm();
}

Vector LogisticObjective::gradient(const Vector& x) const {
  if (x.size() != dimension()) throw std::invalid_argument("gradient: dimension mismatch");
  const Vector scores = data_->features * x;
  Vector residual(scores.size());
  for (Index j = 0; j < scores.size(); ++j)
    residual[j] = sigmoid(scores[j]) - data_->labels[j];
  Vector g = data_->features.transpose() * residual / static_cast<double>(sample_count());
  g += 2.0 * eta_ * x;
  return g;
}

Vector LogisticObjective::sample_gradient(const Vector& x, Index j) const {
  if (x.size() != dimension()) throw std::invalid_argument("sample_gradient: dimension mismatch");
  if (j < 0 || j >= sample_count())
    throw std::invalid_argument("sample_gradient: index out of range");
  const double s = data_->features.row(j).dot(x);
  Vector g = (sigmoid(s) - data_->labels[j]) * data_->features.row(j).transpose();
  g += 2.0 * eta_ * x;
  return g;
}

SmoothnessInfo LogisticObjective::smoothness() const {
  // Per-sample bound L_j = ||a_j||^2 / 4 + 2 eta; the average objective is
  // smooth with constant at most the mean of the per-sample bounds.
  NeumaierSum acc;
  double max_l = 0.0;
  for (Index j = 0; j < sample_count(); ++j) {
    const double lj = 0.25 * data_->features.row(j).squaredNorm() + 2.0 * eta_;
    acc.add(lj);
    max_l = std::max(max_l, lj);
  }
  return {acc.value() / static_cast<double>(sample_count()), max_l};
}

QuadraticObjective::QuadraticObjective(Matrix a, Vector b) : a_(std::move(a)), b_(std::move(b)) {
  if (a_.rows() != a_.cols() || a_.rows() != b_.size())
    throw std::invalid_argument("QuadraticObjective: shape mismatch");
  if ((a_ - a_.transpose()).cwiseAbs().maxCoeff() > 1e-12)
    throw std::invalid_argument("QuadraticObjective: matrix must be symmetric");
  Eigen::SelfAdjointEigenSolver<Matrix> es(a_, Eigen::EigenvaluesOnly);
  lambda_min_ = es.eigenvalues().minCoeff();
  lambda_max_ = es.eigenvalues().maxCoeff();
  if (lambda_min_ < -1e-12)
    throw std::invalid_argument("QuadraticObjective: matrix must be positive semidefinite");
  lambda_min_ = std::max(lambda_min_, 0.0);
}

double QuadraticObjective::value(const Vector& x) const {
  if (x.size() != dimension()) throw std::invalid_argument("value: dimension mismatch");
  return 0.5 * x.dot(a_ * x) - b_.dot(x);
}

Vector QuadraticObjective::gradient(const Vector& x) const {
  if (x.size() != dimension()) throw std::invalid_argument("gradient: dimension mismatch");
  return a_ * x - b_;
}

Vector QuadraticObjective::sample_gradient(const Vector& x, Index j) const {
  if (j != 0) throw std::invalid_argument("sample_gradient: quadratic has a single component");
  return gradient(x);
}

SmoothnessInfo QuadraticObjective::smoothness() const { return {lambda_max_, lambda_max_}; }

Vector QuadraticObjective::minimizer() const {
  if (lambda_min_ <= 0.0)
    throw std::runtime_error("QuadraticObjective: minimizer needs positive definite matrix");
  return a_.ldlt().solve(b_);
}

Vector minibatch_delta(const Objective& obj, const std::vector<Index>& batch,
                       const Vector& x_new, const Vector& x_old) {
  if (batch.empty()) throw std::invalid_argument("minibatch_delta: empty batch");
  if (x_new.size() != obj.dimension() || x_old.size() != obj.dimension())
    throw std::invalid_argument("minibatch_delta: dimension mismatch");
  Vector acc = Vector::Zero(obj.dimension());
  for (const Index j : batch) {
    if (j < 0 || j >= obj.sample_count())
      throw std::invalid_argument("minibatch_delta: index out of range");
    acc += obj.sample_gradient(x_new, j) - obj.sample_gradient(x_old, j);
  }
  return acc / static_cast<double>(batch.size());
}

bool ClientAssignment::is_good(Index client) const {
  return std::binary_search(good.begin(), good.end(), client);
}

ClientAssignment split_clients(std::shared_ptr<const Dataset> ds, Index n, Index byzantine,
                               SplitMode mode, RngStream& rng) {
  (void)rng;  // splits are deterministic; the lane is part of the interface
  if (!ds) throw std::invalid_argument("split_clients: null dataset");
  if (n < 1) throw std::invalid_argument("split_clients: need at least one client");
  if (byzantine < 0 || 2 * byzantine >= n)
    throw std::invalid_argument("split_clients: byzantine count must satisfy B < n/2");

  ClientAssignment out;
  out.mode = mode;
  out.good.resize(static_cast<std::size_t>(n - byzantine));
  std::iota(out.good.begin(), out.good.end(), Index{0});

  if (mode == SplitMode::Homogeneous) {
    out.datasets.assign(static_cast<std::size_t>(n), ds);
    return out;
  }

  // Label-sorted heterogeneous: stable-sort sample indices by label, shard
  // contiguously into n chunks of near-equal size.
  const Index m = ds->sample_count();
  if (m < n) throw std::invalid_argument("split_clients: fewer samples than clients");
  std::vector<Index> order(static_cast<std::size_t>(m));
  std::iota(order.begin(), order.end(), Index{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](Index a, Index b) { return ds->labels[a] < ds->labels[b]; });

  out.datasets.reserve(static_cast<std::size_t>(n));
  const Index base = m / n;
  const Index extra = m % n;
  Index cursor = 0;
  for (Index c = 0; c < n; ++c) {
    const Index size = base + (c < extra ? 1 : 0);
    auto shard = std::make_shared<Dataset>();
    shard->features.resize(size, ds->dimension());
    shard->labels.resize(size);
    for (Index r = 0; r < size; ++r) {
      const Index src = order[static_cast<std::size_t>(cursor + r)];
      shard->features.row(r) = ds->features.row(src);
      shard->labels[r] = ds->labels[src];
    }
    cursor += size;
    out.datasets.push_back(std::move(shard));
  }
  return out;
}

ReferenceSolution reference_solution(const Objective& obj, double tol, Index max_iters) {
  if (const auto* quad = dynamic_cast<const QuadraticObjective*>(&obj)) {
    if (quad->pl_lower_bound() > 0.0) {
      Vector x = quad->minimizer();
      return {x, quad->value(x), quad->gradient(x).norm(), 0};
    }
  }
  if (obj.pl_lower_bound() <= 0.0)
    throw std::invalid_argument("reference_solution: objective must be strongly convex");

  const double step = 1.0 / measure_smoothness(obj).l_bound;
  Vector x = Vector::Zero(obj.dimension());
  for (Index it = 0; it < max_iters; ++it) {
    const Vector g = obj.gradient(x);
    const double gn = g.norm();
    if (gn <= tol) return {x, obj.value(x), gn, it};
    x -= step * g;
  }
  const double gn = obj.gradient(x).norm();
  std::ostringstream os;
  os << "reference_solution: no convergence within " << max_iters
     << " iterations; final gradient norm " << gn;
  throw std::runtime_error(os.str());
}

SmoothnessInfo measure_smoothness(const Objective& obj) { return obj.smoothness(); }

}  // namespace byzsim
