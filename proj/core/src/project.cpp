#include "dsm/project.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <limits>

#include "dsm/csv.hpp"
#include "dsm/error.hpp"
#include "dsm/random.hpp"

namespace dsm::project {

namespace {

void check_labels(const mlharness::FeatureMatrix& x, const mlharness::LabelVector& labels) {
  if (!labels.empty() && labels.size() != x.rows())
    throw Error(ErrorCode::DimensionMismatch, "labels vs rows");
}

std::vector<double> squared_distances(const mlharness::FeatureMatrix& x) {
  const std::size_t n = x.rows();
  std::vector<double> d(n * n, 0.0);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j) {
      double s = 0.0;
      for (std::size_t c = 0; c < x.cols(); ++c) {
        const double diff = x(i, c) - x(j, c);
        s += diff * diff;
      }
      d[i * n + j] = d[j * n + i] = s;
    }
  return d;
}

double kl_of(const std::vector<double>& p, const std::vector<double>& q) {
  double kl = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i)
    if (p[i] > 0.0) kl += p[i] * std::log(p[i] / std::max(q[i], 1e-300));
  return kl;
}

// Student-t joint probabilities of the layout; also returns the unnormalized kernel.
std::vector<double> student_q(const std::vector<std::array<double, 2>>& y, std::vector<double>& num) {
  const std::size_t n = y.size();
  num.assign(n * n, 0.0);
  double total = 0.0;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j) {
      const double dx = y[i][0] - y[j][0], dy = y[i][1] - y[j][1];
      const double v = 1.0 / (1.0 + dx * dx + dy * dy);
      num[i * n + j] = num[j * n + i] = v;
      total += 2.0 * v;
    }
  std::vector<double> q(n * n);
  for (std::size_t k = 0; k < q.size(); ++k) q[k] = num[k] / total;
  return q;
}

}  // namespace

PcaResult pca_2d(const mlharness::FeatureMatrix& x, const mlharness::LabelVector& labels) {
  if (x.rows() < 3 || x.cols() < 2)
    throw Error(ErrorCode::InsufficientData, "PCA needs at least 3 rows and 2 columns");
  check_labels(x, labels);
  const auto n = static_cast<Eigen::Index>(x.rows());
  const auto d = static_cast<Eigen::Index>(x.cols());
  Eigen::MatrixXd m(n, d);
  for (Eigen::Index r = 0; r < n; ++r)
    for (Eigen::Index c = 0; c < d; ++c) m(r, c) = x(static_cast<std::size_t>(r), static_cast<std::size_t>(c));
  m.rowwise() -= m.colwise().mean();
  const Eigen::MatrixXd cov = (m.transpose() * m) / static_cast<double>(n - 1);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(cov);
  if (solver.info() != Eigen::Success) throw Error(ErrorCode::DegenerateCovariance, "eigen solver failed");
  const auto& values = solver.eigenvalues();  // ascending
  if (!(values(d - 1) > 1e-12)) throw Error(ErrorCode::DegenerateCovariance, "all rows are identical");

  PcaResult out;
  Eigen::MatrixXd basis(d, 2);
  for (int k = 0; k < 2; ++k) {
    Eigen::VectorXd v = solver.eigenvectors().col(d - 1 - k);
    Eigen::Index arg = 0;
    v.cwiseAbs().maxCoeff(&arg);
    if (v(arg) < 0) v = -v;
    basis.col(k) = v;
    out.component_variance[static_cast<std::size_t>(k)] = std::max(values(d - 1 - k), 0.0);
    out.loadings[static_cast<std::size_t>(k)].assign(v.data(), v.data() + d);
  }
  const Eigen::MatrixXd proj = m * basis;
  out.embedding.method = "pca";
  out.embedding.row_ids = x.row_ids();
  out.embedding.labels = labels;
  for (Eigen::Index r = 0; r < n; ++r) out.embedding.points.push_back({proj(r, 0), proj(r, 1)});
  return out;
}

void TsneConfig::validate() const {
  if (!(perplexity > 0.0)) throw Error(ErrorCode::InvalidParameter, "perplexity must be positive");
  if (iterations == 0) throw Error(ErrorCode::InvalidParameter, "iterations must be positive");
  if (!(learning_rate > 0.0)) throw Error(ErrorCode::InvalidParameter, "learning_rate must be positive");
  if (!(early_exaggeration >= 1.0)) throw Error(ErrorCode::InvalidParameter, "early_exaggeration must be >= 1");
}

namespace detail {

std::vector<double> calibrate_affinities(const std::vector<double>& sq_dist, std::size_t n, double perplexity,
                                         std::vector<double>& conditional) {
  constexpr double kTol = 1e-5;
  constexpr int kMaxTries = 50;
  const double target = std::log(perplexity);
  conditional.assign(n * n, 0.0);
  std::vector<double> achieved(n);
  std::vector<double> row(n);

  for (std::size_t i = 0; i < n; ++i) {
    // Shift by the nearest-neighbour distance so exp() cannot underflow to all zeros.
    double dmin = std::numeric_limits<double>::infinity();
    for (std::size_t j = 0; j < n; ++j)
      if (j != i) dmin = std::min(dmin, sq_dist[i * n + j]);

    double beta = 1.0, lo = -std::numeric_limits<double>::infinity(), hi = std::numeric_limits<double>::infinity();
    double entropy = 0.0;
    auto evaluate = [&] {
      double sum = 0.0, weighted = 0.0;
      for (std::size_t j = 0; j < n; ++j) {
        if (j == i) {
          row[j] = 0.0;
          continue;
        }
        const double shifted = sq_dist[i * n + j] - dmin;
        row[j] = std::exp(-beta * shifted);
        sum += row[j];
        weighted += shifted * row[j];
      }
      entropy = std::log(sum) + beta * weighted / sum;
      for (auto& v : row) v /= sum;
    };
    evaluate();
    for (int t = 0; t < kMaxTries && std::abs(entropy - target) > kTol; ++t) {
      if (entropy > target) {
        lo = beta;
        beta = std::isinf(hi) ? beta * 2.0 : (beta + hi) / 2.0;
      } else {
        hi = beta;
        beta = std::isinf(lo) ? beta / 2.0 : (beta + lo) / 2.0;
      }
      evaluate();
    }
    std::copy(row.begin(), row.end(), conditional.begin() + static_cast<std::ptrdiff_t>(i * n));
    achieved[i] = std::exp(entropy);
  }
  return achieved;
}

}  // namespace detail

TsneResult tsne_2d(const mlharness::FeatureMatrix& x, const TsneConfig& cfg, const mlharness::LabelVector& labels) {
  cfg.validate();
  check_labels(x, labels);
  const std::size_t n = x.rows();
  if (static_cast<double>(n) < 3.0 * cfg.perplexity)
    throw Error(ErrorCode::PerplexityTooLarge, "t-SNE needs at least 3 * perplexity rows (" + std::to_string(n) +
                                                   " rows, perplexity " + csv::format_double(cfg.perplexity) + ")");

  TsneResult out;
  std::vector<double> conditional;
  out.achieved_perplexity = detail::calibrate_affinities(squared_distances(x), n, cfg.perplexity, conditional);
  out.p.assign(n * n, 0.0);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j)
      out.p[i * n + j] = (conditional[i * n + j] + conditional[j * n + i]) / (2.0 * static_cast<double>(n));

  Rng rng(cfg.seed);
  std::vector<std::array<double, 2>> y(n), step(n, {0.0, 0.0}), gains(n, {1.0, 1.0}), grad(n);
  for (auto& pt : y) pt = {rng.normal() * 1e-4, rng.normal() * 1e-4};

  std::vector<double> num;
  for (std::size_t it = 0; it < cfg.iterations; ++it) {
    const double exaggeration = it < cfg.exaggeration_iterations ? cfg.early_exaggeration : 1.0;
    const double momentum = it < cfg.momentum_switch ? cfg.initial_momentum : cfg.final_momentum;
    const auto q = student_q(y, num);
    out.kl_history.push_back(kl_of(out.p, q));

    for (std::size_t i = 0; i < n; ++i) {
      double gx = 0.0, gy = 0.0;
      for (std::size_t j = 0; j < n; ++j) {
        if (j == i) continue;
        const double mult = (exaggeration * out.p[i * n + j] - q[i * n + j]) * num[i * n + j];
        gx += mult * (y[i][0] - y[j][0]);
        gy += mult * (y[i][1] - y[j][1]);
      }
      grad[i] = {4.0 * gx, 4.0 * gy};
    }
    for (std::size_t i = 0; i < n; ++i)
      for (int k = 0; k < 2; ++k) {
        double& g = gains[i][k];
        g = ((grad[i][k] > 0.0) != (step[i][k] > 0.0)) ? g + 0.2 : g * 0.8;
        g = std::max(g, 0.01);
        step[i][k] = momentum * step[i][k] - cfg.learning_rate * g * grad[i][k];
        y[i][k] += step[i][k];
      }
    std::array<double, 2> mean{0.0, 0.0};
    for (const auto& pt : y) {
      mean[0] += pt[0] / static_cast<double>(n);
      mean[1] += pt[1] / static_cast<double>(n);
    }
    for (auto& pt : y) {
      pt[0] -= mean[0];
      pt[1] -= mean[1];
    }
  }
  out.kl_history.push_back(kl_of(out.p, student_q(y, num)));
  for (const auto& pt : y)
    if (!std::isfinite(pt[0]) || !std::isfinite(pt[1]))
      throw Error(ErrorCode::NonFiniteLoss, "t-SNE layout diverged");

  out.embedding.method = "tsne";
  out.embedding.parameters = {{"perplexity", cfg.perplexity},
                              {"iterations", static_cast<double>(cfg.iterations)},
                              {"seed", static_cast<double>(cfg.seed)},
                              {"learning_rate", cfg.learning_rate},
                              {"early_exaggeration", cfg.early_exaggeration}};
  out.embedding.points = std::move(y);
  out.embedding.row_ids = x.row_ids();
  out.embedding.labels = labels;
  return out;
}

std::vector<ScatterPoint> scatter_export(const mlharness::FeatureMatrix& x, const mlharness::LabelVector& y) {
  if (x.cols() != 2)
    throw Error(ErrorCode::WrongColumnCount, "scatter export needs exactly 2 columns, got " + std::to_string(x.cols()));
  if (y.size() != x.rows()) throw Error(ErrorCode::DimensionMismatch, "labels vs rows");
  std::vector<ScatterPoint> out;
  for (std::size_t r = 0; r < x.rows(); ++r) out.push_back({x(r, 0), x(r, 1), y[r], x.row_ids()[r]});
  return out;
}

std::string scatter_to_csv(const std::vector<ScatterPoint>& points) {
  std::string s = "x,y,label,subject_id\n";
  for (const auto& p : points)
    s += csv::join_row({csv::format_double(p.x), csv::format_double(p.y), std::to_string(p.label), p.subject_id}) +
         "\n";
  return s;
}

std::string embedding_to_csv(const Embedding2D& e) {
  std::string s = "x,y,label,subject_id\n";
  for (std::size_t i = 0; i < e.points.size(); ++i) {
    const std::string label = e.labels.empty() ? "" : std::to_string(e.labels[i]);
    const std::string id = i < e.row_ids.size() ? e.row_ids[i] : "";
    s += csv::join_row({csv::format_double(e.points[i][0]), csv::format_double(e.points[i][1]), label, id}) + "\n";
  }
  return s;
}

std::vector<ScatterPoint> scatter_from_csv(const std::string& path) {
  const auto table = csv::read_file(path);
  if (table.rows.empty() || table.rows[0] != csv::Row{"x", "y", "label", "subject_id"})
    throw Error(ErrorCode::MalformedCsv, path + ": expected header x,y,label,subject_id");
  std::vector<ScatterPoint> out;
  for (std::size_t r = 1; r < table.rows.size(); ++r) {
    const auto& row = table.rows[r];
    ScatterPoint p;
    double label = 0.0;
    if (row.size() != 4 || !csv::parse_double(row[0], p.x) || !csv::parse_double(row[1], p.y) ||
        !csv::parse_double(row[2], label))
      throw Error(ErrorCode::MalformedCsv, path + ": bad row at line " + std::to_string(table.line_numbers[r]));
    p.label = static_cast<int>(label);
    p.subject_id = row[3];
    out.push_back(std::move(p));
  }
  return out;
}

double silhouette_score(const std::vector<std::array<double, 2>>& points, const std::vector<int>& labels) {
  const std::size_t n = points.size();
  if (labels.size() != n || n < 2) throw Error(ErrorCode::DimensionMismatch, "silhouette needs labeled points");
  auto dist = [&](std::size_t a, std::size_t b) {
    return std::hypot(points[a][0] - points[b][0], points[a][1] - points[b][1]);
  };
  double total = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    std::map<int, std::pair<double, std::size_t>> by_label;
    for (std::size_t j = 0; j < n; ++j) {
      if (j == i) continue;
      auto& acc = by_label[labels[j]];
      acc.first += dist(i, j);
      acc.second += 1;
    }
    const auto own = by_label.find(labels[i]);
    if (own == by_label.end() || own->second.second == 0) continue;  // singleton cluster scores 0
    const double a = own->second.first / static_cast<double>(own->second.second);
    double b = std::numeric_limits<double>::infinity();
    for (const auto& [lab, acc] : by_label)
      if (lab != labels[i]) b = std::min(b, acc.first / static_cast<double>(acc.second));
    if (std::isinf(b)) continue;
    total += (b - a) / std::max(a, b);
  }
  return total / static_cast<double>(n);
}

}  // namespace dsm::project
