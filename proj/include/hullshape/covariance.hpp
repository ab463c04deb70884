// Copyright 2026 The Hullshape Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

// Built-in Gaussian process models.  Each model is a centred process on [0,1]
// with d independent coordinates sharing one scalar covariance kernel
// r(t, s), so the matrix covariance is R(t, s) = r(t, s) * I_d.
//
// Kernels:
//   bm               r(t,s) = min(t,s)
//   fbm:H=h          r(t,s) = (t^2H + s^2H - |t-s|^2H) / 2
//   fbb:H=h          fbm pinned to 0 at t = 1:
//                    r_fbb(t,s) = r(t,s) - r(t,1) r(s,1)   (r(1,1) = 1)
//   singleton:var=v  r(t,s) = v  (one Gaussian vector, constant in time)
//
// The fbb kernel reduces to the classical Brownian bridge min(t,s) - ts at
// H = 1/2.  Where a supremum sigma = sqrt(sup_t r(t,t)) is known in closed
// form it is carried on the model for downstream cross-checks.

#include <cmath>
#include <functional>
#include <optional>
#include <stdexcept>
#include <string>

namespace hullshape {

inline double kernel_bm(double t, double s) { return std::min(t, s); }

inline double kernel_fbm(double t, double s, double hurst) {
  return 0.5 * (std::pow(t, 2.0 * hurst) + std::pow(s, 2.0 * hurst) -
                std::pow(std::fabs(t - s), 2.0 * hurst));
}

inline double kernel_fbb(double t, double s, double hurst) {
  return kernel_fbm(t, s, hurst) -
         kernel_fbm(t, 1.0, hurst) * kernel_fbm(s, 1.0, hurst);
}

// Pointwise variance of the fractional bridge,
//   sigma^2(t) = t^2H - (t^2H + 1 - (1-t)^2H)^2 / 4,
// maximised over [0,1] at t = 1/2 with value 2^-2H - 1/4.
inline double fbb_sigma_sq(double t, double hurst) {
  const double a = std::pow(t, 2.0 * hurst);
  const double b = 0.5 * (a + 1.0 - std::pow(1.0 - t, 2.0 * hurst));
  return a - b * b;
}

class CovarianceModel {
 public:
  enum class Kind { kBrownian, kFractional, kBridge, kSingleton };

  static CovarianceModel brownian(int dim) {
    CovarianceModel m(Kind::kBrownian, "bm", dim);
    m.kernel_ = kernel_bm;
    m.closed_form_sigma_ = 1.0;
    return m;
  }

  static CovarianceModel fractional(double hurst, int dim) {
    check_hurst(hurst);
    CovarianceModel m(Kind::kFractional, "fbm:H=" + format_param(hurst), dim);
    m.hurst_ = hurst;
    m.kernel_ = [hurst](double t, double s) { return kernel_fbm(t, s, hurst); };
    m.closed_form_sigma_ = 1.0;  // sup of t^2H on (0,1] is at t = 1.
    return m;
  }

  static CovarianceModel bridge(double hurst, int dim) {
    check_hurst(hurst);
    CovarianceModel m(Kind::kBridge, "fbb:H=" + format_param(hurst), dim);
    m.hurst_ = hurst;
    m.kernel_ = [hurst](double t, double s) { return kernel_fbb(t, s, hurst); };
    m.closed_form_sigma_ = std::sqrt(std::pow(2.0, -2.0 * hurst) - 0.25);
    return m;
  }

  static CovarianceModel singleton(double variance, int dim) {
    if (!(variance > 0.0) || !std::isfinite(variance)) {
      throw std::invalid_argument("singleton: var must be positive");
    }
    CovarianceModel m(Kind::kSingleton, "singleton:var=" + format_param(variance),
                      dim);
    m.variance_ = variance;
    m.kernel_ = [variance](double, double) { return variance; };
    m.closed_form_sigma_ = std::sqrt(variance);
    return m;
  }

  Kind kind() const { return kind_; }
  const std::string& name() const { return name_; }
  int dim() const { return dim_; }
  double hurst() const { return hurst_; }
  double variance() const { return variance_; }

  double kernel(double t, double s) const { return kernel_(t, s); }

  // sqrt(sup_t r(t,t)) when known analytically.  With i.i.d. coordinates the
  // limit-shape support function equals this constant in every direction.
  std::optional<double> closed_form_sigma() const { return closed_form_sigma_; }

 private:
  CovarianceModel(Kind kind, std::string name, int dim)
      : kind_(kind), name_(std::move(name)), dim_(dim) {
    if (dim < 1) throw std::invalid_argument("model: dim must be >= 1");
  }

  static void check_hurst(double hurst) {
    if (!(hurst > 0.0) || !(hurst < 1.0)) {
      throw std::invalid_argument("model: H must lie in (0, 1)");
    }
  }

  static std::string format_param(double v) {
    std::string s = std::to_string(v);
    while (s.size() > 1 && s.back() == '0') s.pop_back();
    if (!s.empty() && s.back() == '.') s.pop_back();
    return s;
  }

  Kind kind_;
  std::string name_;
  int dim_;
  double hurst_ = 0.0;
  double variance_ = 0.0;
  std::function<double(double, double)> kernel_;
  std::optional<double> closed_form_sigma_;
};

// Parses "bm", "fbm:H=0.75", "fbb:H=0.5" or "singleton:var=2".
inline CovarianceModel parse_model(const std::string& spec, int dim) {
  const auto colon = spec.find(':');
  const std::string head = spec.substr(0, colon);
  std::string param;
  if (colon != std::string::npos) param = spec.substr(colon + 1);

  const auto numeric_arg = [&](const std::string& key) {
    const std::string prefix = key + "=";
    if (param.rfind(prefix, 0) != 0) {
      throw std::invalid_argument("model '" + spec + "': expected " + prefix +
                                  "<value>");
    }
    std::size_t used = 0;
    double value = 0.0;
    try {
      value = std::stod(param.substr(prefix.size()), &used);
    } catch (const std::exception&) {
      throw std::invalid_argument("model '" + spec + "': bad numeric value");
    }
    if (used != param.size() - prefix.size()) {
      throw std::invalid_argument("model '" + spec + "': trailing characters");
    }
    return value;
  };

  if (head == "bm") {
    if (!param.empty())
      throw std::invalid_argument("model 'bm' takes no parameters");
    return CovarianceModel::brownian(dim);
  }
  if (head == "fbm") return CovarianceModel::fractional(numeric_arg("H"), dim);
  if (head == "fbb") return CovarianceModel::bridge(numeric_arg("H"), dim);
  if (head == "singleton")
    return CovarianceModel::singleton(numeric_arg("var"), dim);
  throw std::invalid_argument("unknown model '" + spec + "'");
}

}  // namespace hullshape
