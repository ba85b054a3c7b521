#include "windest/airmodel.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <numeric>
#include <sstream>
#include <stdexcept>

namespace windest {

namespace {

// Count values that remain distinct after merging anything closer than tol.
int count_distinct(std::vector<double> vals, double tol) {
  std::sort(vals.begin(), vals.end());
  int count = vals.empty() ? 0 : 1;
  for (size_t i = 1; i < vals.size(); ++i)
    if (vals[i] - vals[i - 1] > tol) ++count;
  return count;
}

double horizontal_speed(const CalibrationPoint& p) {
  return std::hypot(p.relative_air.x(), p.relative_air.y());
}

double weighted_rms(const Eigen::VectorXd& resid, const Eigen::VectorXd& w) {
  const double wsum = w.sum();
  if (wsum <= 0.0) return 0.0;
  return std::sqrt((w.array() * resid.array().square()).sum() / wsum);
}

}  // namespace

std::pair<double, double> force_polar_components(const Vec3& f_ce) {
  if (!f_ce.allFinite()) throw std::invalid_argument("force_polar_components: non-finite input");
  const double f_h = std::hypot(f_ce.x(), f_ce.y());
  const double theta_r = (f_h == 0.0) ? 0.0 : std::atan2(f_ce.y(), f_ce.x());
  return {theta_r, f_h};
}

std::vector<int> clean_dataset_indices(const std::vector<CalibrationPoint>& points,
                                       int k, double threshold) {
  if (k < 1) throw std::invalid_argument("clean_dataset: k must be >= 1");
  if (!(threshold > 0.0)) throw std::invalid_argument("clean_dataset: threshold must be > 0");
  const int n = static_cast<int>(points.size());
  if (n < k + 1)
    throw std::runtime_error("clean_dataset: need at least k+1 = " + std::to_string(k + 1) +
                             " points, got " + std::to_string(n));

  // Feature space: (m, n, V) = horizontal force components and horizontal
  // air speed, each normalized by its std-dev so axes are comparable.
  Eigen::MatrixXd feat(n, 3);
  for (int i = 0; i < n; ++i)
    feat.row(i) << points[i].f_ce.x(), points[i].f_ce.y(), horizontal_speed(points[i]);
  for (int c = 0; c < 3; ++c) {
    const double mean = feat.col(c).mean();
    double sd = std::sqrt((feat.col(c).array() - mean).square().sum() / n);
    if (sd <= 0.0) sd = 1.0;
    feat.col(c) = (feat.col(c).array() - mean) / sd;
  }

  std::vector<double> knn_stat(n);
  std::vector<double> d;
  for (int i = 0; i < n; ++i) {
    d.clear();
    for (int j = 0; j < n; ++j)
      if (j != i) d.push_back((feat.row(i) - feat.row(j)).norm());
    std::nth_element(d.begin(), d.begin() + (k - 1), d.end());
    knn_stat[i] = std::accumulate(d.begin(), d.begin() + k, 0.0) / k;
  }

  std::vector<double> sorted_stat = knn_stat;
  std::nth_element(sorted_stat.begin(), sorted_stat.begin() + n / 2, sorted_stat.end());
  const double median = sorted_stat[n / 2];
  const double cut = threshold * median;

  // Flag offenders, worst first, capped at 20% of the set.
  std::vector<int> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(),
            [&](int a, int b) { return knn_stat[a] > knn_stat[b]; });
  const int max_removals = n / 5;
  std::vector<bool> removed(n, false);
  int removals = 0;
  for (int idx : order) {
    if (removals >= max_removals) break;
    if (knn_stat[idx] > cut) {
      removed[idx] = true;
      ++removals;
    }
  }

  std::vector<int> kept;
  kept.reserve(n - removals);
  for (int i = 0; i < n; ++i)
    if (!removed[i]) kept.push_back(i);
  return kept;
}

std::vector<CalibrationPoint> clean_dataset(const std::vector<CalibrationPoint>& points,
                                            int k, double threshold) {
  std::vector<CalibrationPoint> out;
  for (int i : clean_dataset_indices(points, k, threshold)) out.push_back(points[i]);
  return out;
}

HorizontalFit fit_horizontal_model(const std::vector<CalibrationPoint>& points) {
  const int n = static_cast<int>(points.size());
  if (n < 5) throw std::runtime_error("fit_horizontal_model: need >= 5 points");

  std::vector<double> angles, speeds;
  angles.reserve(n);
  speeds.reserve(n);
  for (const auto& p : points) {
    auto [th, fh] = force_polar_components(p.f_ce);
    if (fh > 1e-9) angles.push_back(th);
    speeds.push_back(horizontal_speed(p));
  }
  if (count_distinct(angles, 1e-6) < 3)
    throw std::runtime_error("fit_horizontal_model: need >= 3 distinct force angles");
  if (count_distinct(speeds, 1e-6) < 2)
    throw std::runtime_error("fit_horizontal_model: need >= 2 distinct speeds");

  Eigen::MatrixXd A(n, 5);
  Eigen::VectorXd b(n), w(n);
  for (int i = 0; i < n; ++i) {
    const double m = points[i].f_ce.x();
    const double nn = points[i].f_ce.y();
    A.row(i) << 1.0, m, nn, m * m, nn * nn;
    b(i) = horizontal_speed(points[i]);
    if (points[i].weight < 0.0)
      throw std::invalid_argument("fit_horizontal_model: negative weight");
    w(i) = points[i].weight;
  }
  const Eigen::VectorXd sw = w.array().sqrt();
  const Eigen::MatrixXd Aw = sw.asDiagonal() * A;
  const Eigen::VectorXd bw = sw.asDiagonal() * b;

  Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(Aw);
  qr.setThreshold(1e-10);
  if (qr.rank() < 5) {
    static const char* kBasis[5] = {"1", "m", "n", "m^2", "n^2"};
    const auto perm = qr.colsPermutation().indices();
    std::string deficient;
    for (int i = qr.rank(); i < 5; ++i) {
      if (!deficient.empty()) deficient += ", ";
      deficient += kBasis[perm(i)];
    }
    throw std::runtime_error("fit_horizontal_model: rank-deficient system; dependent basis: " +
                             deficient);
  }
  const Eigen::VectorXd x = qr.solve(bw);

  HorizontalFit fit;
  for (int i = 0; i < 5; ++i) fit.coeffs[i] = x(i);
  fit.residual_rms = weighted_rms(b - A * x, w);
  return fit;
}

VerticalFit fit_vertical_model(const std::vector<CalibrationPoint>& points) {
  const int n = static_cast<int>(points.size());
  if (n < 3) throw std::runtime_error("fit_vertical_model: need >= 3 points");

  std::vector<double> fz;
  fz.reserve(n);
  for (const auto& p : points) fz.push_back(p.f_ce.z());
  if (count_distinct(fz, 1e-9) < 3)
    throw std::runtime_error("fit_vertical_model: need >= 3 distinct f_cez values");
  const auto [lo, hi] = std::minmax_element(fz.begin(), fz.end());
  if (!(*lo < 0.0 && *hi > 0.0))
    throw std::runtime_error("fit_vertical_model: data must span both force signs");

  Eigen::MatrixXd A(n, 3);
  Eigen::VectorXd b(n), w(n);
  for (int i = 0; i < n; ++i) {
    const double f = points[i].f_ce.z();
    A.row(i) << f, f * std::abs(f), f * f * f;
    b(i) = points[i].relative_air.z();
    if (points[i].weight < 0.0)
      throw std::invalid_argument("fit_vertical_model: negative weight");
    w(i) = points[i].weight;
  }
  const Eigen::VectorXd sw = w.array().sqrt();
  Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(sw.asDiagonal() * A);
  qr.setThreshold(1e-10);
  if (qr.rank() < 3)
    throw std::runtime_error("fit_vertical_model: rank-deficient system");
  const Eigen::VectorXd x = qr.solve(sw.asDiagonal() * b);

  VerticalFit fit;
  for (int i = 0; i < 3; ++i) fit.coeffs[i] = x(i);
  fit.residual_rms = weighted_rms(b - A * x, w);
  return fit;
}

double evaluate_horizontal(const ForceAirModel& model, double m, double n) {
  const auto& c = model.horizontal_coeffs;
  const double v = c[0] + c[1] * m + c[2] * n + c[3] * m * m + c[4] * n * n;
  return std::max(v, 0.0);
}

double evaluate_vertical(const ForceAirModel& model, double f_cez) {
  const auto& c = model.vertical_coeffs;
  return c[0] * f_cez + c[1] * f_cez * std::abs(f_cez) + c[2] * f_cez * f_cez * f_cez;
}

PredictedAir predict_relative_air(const Vec3& f_ce, const ForceAirModel& model,
                                  double low_force_threshold) {
  const auto [theta_r, f_h] = force_polar_components(f_ce);
  PredictedAir out;
  out.low_confidence = f_h < low_force_threshold;
  const double v_wh = evaluate_horizontal(model, f_ce.x(), f_ce.y());
  const double c = (f_h == 0.0) ? 1.0 : std::cos(theta_r);
  const double s = (f_h == 0.0) ? 0.0 : std::sin(theta_r);
  out.a_rc = Vec3(v_wh * c, v_wh * s, evaluate_vertical(model, f_ce.z()));
  return out;
}

namespace {

std::string fmt17(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

}  // namespace

std::string model_to_text(const ForceAirModel& model) {
  std::ostringstream os;
  os << "# force-air model: V_wh = c0 + c_m*m + c_n*n + c_mm*m^2 + c_nn*n^2\n";
  os << "#                  V_wv = v1*f + v2*f|f| + v3*f^3   (f = f_cez)\n";
  os << "# forces in N, speeds in m/s, intermediate frame (z down, yaw = psi_d)\n";
  os << "format=windest-airmodel-v1\n";
  os << "frame=intermediate-z-down\n";
  os << "euler=zyx\n";
  const char* hk[5] = {"c0", "c_m", "c_n", "c_mm", "c_nn"};
  for (int i = 0; i < 5; ++i) os << hk[i] << "=" << fmt17(model.horizontal_coeffs[i]) << "\n";
  const char* vk[3] = {"v1", "v2", "v3"};
  for (int i = 0; i < 3; ++i) os << vk[i] << "=" << fmt17(model.vertical_coeffs[i]) << "\n";
  os << "fit_residual_rms=" << fmt17(model.fit_residual_rms) << "\n";
  os << "vertical_residual_rms=" << fmt17(model.vertical_residual_rms) << "\n";
  os << "fh_min=" << fmt17(model.fh_min) << "\n";
  os << "fh_max=" << fmt17(model.fh_max) << "\n";
  return os.str();
}

ForceAirModel model_from_text(const std::string& text) {
  std::map<std::string, std::string> kv;
  std::istringstream is(text);
  std::string line;
  int lineno = 0;
  while (std::getline(is, line)) {
    ++lineno;
    const auto first = line.find_first_not_of(" \t\r");
    if (first == std::string::npos || line[first] == '#') continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw std::runtime_error("model_from_text: line " + std::to_string(lineno) +
                               ": expected key=value");
    auto strip = [](std::string s) {
      const auto a = s.find_first_not_of(" \t\r");
      const auto b = s.find_last_not_of(" \t\r");
      return a == std::string::npos ? std::string() : s.substr(a, b - a + 1);
    };
    kv[strip(line.substr(0, eq))] = strip(line.substr(eq + 1));
  }

  auto get = [&](const std::string& key) -> std::string {
    auto it = kv.find(key);
    if (it == kv.end())
      throw std::runtime_error("model_from_text: missing key '" + key + "'");
    return it->second;
  };
  auto getd = [&](const std::string& key) {
    const std::string s = get(key);
    size_t pos = 0;
    double v;
    try {
      v = std::stod(s, &pos);
    } catch (const std::exception&) {
      throw std::runtime_error("model_from_text: key '" + key + "' is not a number");
    }
    if (pos != s.size() || !std::isfinite(v))
      throw std::runtime_error("model_from_text: key '" + key + "' is not a finite number");
    return v;
  };

  if (get("format") != "windest-airmodel-v1")
    throw std::runtime_error("model_from_text: unsupported format '" + get("format") + "'");

  ForceAirModel m;
  const char* hk[5] = {"c0", "c_m", "c_n", "c_mm", "c_nn"};
  for (int i = 0; i < 5; ++i) m.horizontal_coeffs[i] = getd(hk[i]);
  const char* vk[3] = {"v1", "v2", "v3"};
  for (int i = 0; i < 3; ++i) m.vertical_coeffs[i] = getd(vk[i]);
  m.fit_residual_rms = getd("fit_residual_rms");
  m.vertical_residual_rms = getd("vertical_residual_rms");
  m.fh_min = getd("fh_min");
  m.fh_max = getd("fh_max");
  return m;
}

void save_model(const ForceAirModel& model, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("save_model: cannot open '" + path + "' for writing");
  out << model_to_text(model);
  if (!out) throw std::runtime_error("save_model: write failed for '" + path + "'");
}

ForceAirModel load_model(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("load_model: cannot open '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return model_from_text(ss.str());
}

}  // namespace windest
