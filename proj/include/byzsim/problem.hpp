#pragma once

#include "byzsim/rng.hpp"
#include "byzsim/types.hpp"

#include <iosfwd>
#include <memory>
#include <string>
#include <vector>

namespace byzsim {

/// Dense supervised dataset: one feature row per sample, binary labels in {0,1}.
struct Dataset {
  Matrix features;  // m x d
  Vector labels;    // entries in {0,1}

  Index sample_count() const { return features.rows(); }
  Index dimension() const { return features.cols(); }
  void validate() const;
};

/// Parses LIBSVM text: "<label> <idx>:<val> ...", 1-based strictly increasing
/// indices. Labels -1/0 map to 0 and +1/1 map to 1; the dimension is the
/// largest index seen. Malformed input raises std::runtime_error naming the
/// offending line.
Dataset parse_libsvm(std::istream& in);
Dataset parse_libsvm_file(const std::string& path);

/// Writes the dataset back out in LIBSVM text form (zeros skipped).
void write_libsvm(const Dataset& ds, std::ostream& out);

/// Seeded synthetic binary classification set: Gaussian features scaled to
/// unit expected row norm and labels drawn from a planted logistic separator.
Dataset synthetic_dataset(Index samples, Index dimension, RngStream& rng,
                          double separator_scale = 5.0);

struct SmoothnessInfo {
  double l_bound;        // smoothness constant of the averaged objective
  double max_sample_l;   // max over per-sample constants L_{i,j}
};

/// Finite-sum objective f(x) = (1/m) sum_j f_j(x).
class Objective {
 public:
  virtual ~Objective() = default;
  virtual Index dimension() const = 0;
  virtual Index sample_count() const = 0;
  virtual double value(const Vector& x) const = 0;
  virtual Vector gradient(const Vector& x) const = 0;
  virtual Vector sample_gradient(const Vector& x, Index j) const = 0;
  virtual SmoothnessInfo smoothness() const = 0;
  /// Lower bound on the PL / strong-convexity constant (0 when unknown).
  virtual double pl_lower_bound() const = 0;
};

/// l2-regularised logistic regression:
/// f_j(x) = -y_j log h(x,a_j) - (1-y_j) log(1-h(x,a_j)) + eta ||x||^2
/// with h(x,a) = 1/(1+exp(-a^T x)). Losses use the stable softplus form.
class LogisticObjective final : public Objective {
 public:
  LogisticObjective(std::shared_ptr<const Dataset> data, double eta);

  Index dimension() const override { return data_->dimension(); }
  Index sample_count() const override { return data_->sample_count(); }
  double value(const Vector& x) const override;
  Vector gradient(const Vector& x) const override;
  Vector sample_gradient(const Vector& x, Index j) const override;
  SmoothnessInfo smoothness() const override;
  double pl_lower_bound() const override { return 2.0 * eta_; }

  const Dataset& dataset() const { return *data_; }
  double eta() const { return eta_; }

 private:
  std::shared_ptr<const Dataset> data_;
  double eta_;
};

/// f(x) = x^T A x / 2 - b^T x with A symmetric positive semidefinite.
class QuadraticObjective final : public Objective {
 public:
  QuadraticObjective(Matrix a, Vector b);

  Index dimension() const override { return b_.size(); }
  Index sample_count() const override { return 1; }
  double value(const Vector& x) const override;
  Vector gradient(const Vector& x) const override;
  Vector sample_gradient(const Vector& x, Index j) const override;
  SmoothnessInfo smoothness() const override;
  double pl_lower_bound() const override { return lambda_min_; }

  /// Solves A x = b (requires A positive definite).
  Vector minimizer() const;
  const Matrix& matrix() const { return a_; }

 private:
  Matrix a_;
  Vector b_;
  double lambda_max_;
  double lambda_min_;
};

/// (1/|batch|) sum_{j in batch} (grad f_j(x_new) - grad f_j(x_old)).
/// The same batch is evaluated at both points.
Vector minibatch_delta(const Objective& obj, const std::vector<Index>& batch,
                       const Vector& x_new, const Vector& x_old);

enum class SplitMode { Homogeneous, LabelSortedHeterogeneous };

/// Federation layout: per-client dataset handles and the set of good clients.
/// Clients 0..good-1 are good; the remaining B are Byzantine slots.
struct ClientAssignment {
  std::vector<std::shared_ptr<const Dataset>> datasets;
  std::vector<Index> good;  // sorted ids
  SplitMode mode = SplitMode::Homogeneous;

  Index client_count() const { return static_cast<Index>(datasets.size()); }
  Index good_count() const { return static_cast<Index>(good.size()); }
  bool is_good(Index client) const;
};

/// Splits a dataset over n clients with B Byzantine slots. Homogeneous mode
/// hands every client the full dataset; label-sorted mode sorts samples by
/// label and shards contiguously. Requires B < n/2.
ClientAssignment split_clients(std::shared_ptr<const Dataset> ds, Index n, Index byzantine,
                               SplitMode mode, RngStream& rng);

struct ReferenceSolution {
  Vector x;
  double f_star;
  double grad_norm;
  Index iterations;
};

/// Minimises a strongly convex objective: quadratics are solved directly,
/// otherwise gradient descent with stepsize 1/L runs until ||grad|| <= tol or
/// the iteration cap. Non-convergence raises with the final gradient norm.
ReferenceSolution reference_solution(const Objective& obj, double tol = 1e-12,
                                     Index max_iters = 1000000);

SmoothnessInfo measure_smoothness(const Objective& obj);

}  // namespace byzsim
