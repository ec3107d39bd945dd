#pragma once

#include <Eigen/Dense>
#include <Eigen/SVD>
#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <vector>

namespace flair {

namespace constants {
inline constexpr int kNAlphas = 25;
inline constexpr double kAlphaMin = 1e-4;
inline constexpr double kAlphaMax = 1e4;
}  // namespace constants

enum class GcvTemperature {
	GcvMin,     // softmax temperature = GCV_min (paper default)
	MedianGcv,  // scale-free alternative, harness flag only
	ArgMin,     // hard selection
};

// Closed-form standard Ridge solve, no standardisation. Used both as a
// building block and as the algebraic reference for the prior-centered form.
inline Eigen::VectorXd ridge_solve(const Eigen::MatrixXd& x, const Eigen::VectorXd& y,
                                   double alpha) {
	Eigen::MatrixXd gram = x.transpose() * x;
	gram.diagonal().array() += alpha;
	return gram.ldlt().solve(x.transpose() * y);
}

// Prior-centered Ridge: argmin ||y - X b||^2 + alpha ||b - b*||^2.
inline Eigen::VectorXd ridge_solve_prior_centered(const Eigen::MatrixXd& x,
                                                  const Eigen::VectorXd& y,
                                                  const Eigen::VectorXd& beta_star,
                                                  double alpha) {
	Eigen::MatrixXd gram = x.transpose() * x;
	gram.diagonal().array() += alpha;
	return gram.ldlt().solve(x.transpose() * y + alpha * beta_star);
}

inline Eigen::VectorXd log_spaced_alphas(int n = constants::kNAlphas,
                                         double lo = constants::kAlphaMin,
                                         double hi = constants::kAlphaMax) {
	Eigen::VectorXd out(n);
	const double l0 = std::log(lo);
	const double l1 = std::log(hi);
	for (int k = 0; k < n; ++k) {
		out[k] = std::exp(l0 + (l1 - l0) * k / (n - 1));
	}
	return out;
}

// Softmax weights on GCV scores: w_k ~ exp(-(GCV_k - GCV_min) / temperature).
// A degenerate (zero or non-finite) temperature collapses onto the argmin
// set, split evenly, so that an all-equal score vector still yields 1/n each.
inline Eigen::VectorXd gcv_softmax_weights(const Eigen::VectorXd& gcv, GcvTemperature mode) {
	const int n = static_cast<int>(gcv.size());
	const double gmin = gcv.minCoeff();
	double temperature = 0.0;
	switch (mode) {
		case GcvTemperature::GcvMin:
			temperature = gmin;
			break;
		case GcvTemperature::MedianGcv: {
			std::vector<double> sorted(gcv.data(), gcv.data() + n);
			std::nth_element(sorted.begin(), sorted.begin() + n / 2, sorted.end());
			temperature = sorted[n / 2];
			break;
		}
		case GcvTemperature::ArgMin:
			temperature = 0.0;
			break;
	}

	Eigen::VectorXd w(n);
	if (!(temperature > 0.0) || !std::isfinite(temperature)) {
		const double tie = gmin + 1e-12 * std::abs(gmin) + 1e-300;
		for (int k = 0; k < n; ++k) w[k] = (gcv[k] <= tie) ? 1.0 : 0.0;
	} else {
		for (int k = 0; k < n; ++k) w[k] = std::exp(-(gcv[k] - gmin) / temperature);
	}
	return w / w.sum();
}

// Ridge path solved from one thin SVD of the standardised design, scored by
// GCV and soft-averaged. The first column must be the intercept (all ones);
// remaining columns are standardised to zero mean / unit variance and the
// isotropic penalty acts in that space.
class RidgeGcvFit {
public:
	RidgeGcvFit(const Eigen::MatrixXd& x_raw, const Eigen::VectorXd& y,
	            int n_alphas = constants::kNAlphas,
	            GcvTemperature temperature = GcvTemperature::GcvMin)
	    : n_(static_cast<int>(x_raw.rows())), p_(static_cast<int>(x_raw.cols())) {
		if (x_raw.rows() != y.size() || n_ < 1 || p_ < 1) {
			throw std::invalid_argument("RidgeGcvFit: bad design dimensions");
		}
		means_ = Eigen::VectorXd::Zero(p_);
		stds_ = Eigen::VectorXd::Ones(p_);
		Eigen::MatrixXd x = x_raw;
		for (int j = 1; j < p_; ++j) {
			means_[j] = x.col(j).mean();
			x.col(j).array() -= means_[j];
			const double sd = std::sqrt(x.col(j).squaredNorm() / n_);
			if (sd > 1e-12) {
				stds_[j] = sd;
				x.col(j) /= sd;
			}
		}

		Eigen::BDCSVD<Eigen::MatrixXd> svd(x, Eigen::ComputeThinU | Eigen::ComputeThinV);
		u_ = svd.matrixU();
		v_ = svd.matrixV();
		d_ = svd.singularValues();
		uty_ = u_.transpose() * y;

		alphas_ = log_spaced_alphas(n_alphas);
		coefs_std_.resize(p_, n_alphas);
		gcv_.resize(n_alphas);
		const int r = static_cast<int>(d_.size());
		Eigen::VectorXd shrink(r);
		for (int k = 0; k < n_alphas; ++k) {
			const double alpha = alphas_[k];
			double trace_h = 0.0;
			for (int j = 0; j < r; ++j) {
				const double d2 = d_[j] * d_[j];
				shrink[j] = d_[j] / (d2 + alpha);
				trace_h += d2 / (d2 + alpha);
			}
			coefs_std_.col(k) = v_ * (shrink.array() * uty_.array()).matrix();
			const double rss = (y - x * coefs_std_.col(k)).squaredNorm();
			const double denom = n_ - trace_h;
			gcv_[k] = n_ * rss / (denom * denom);
		}

		weights_ = gcv_softmax_weights(gcv_, temperature);
		finalize(x, y);
	}

	// Experiment hook: concentrate all weight on the grid point nearest to
	// `alpha` and recompute derived quantities.
	void pin_weight_on_alpha(double alpha, const Eigen::MatrixXd& x_raw, const Eigen::VectorXd& y) {
		int best = 0;
		double best_dist = std::numeric_limits<double>::infinity();
		for (int k = 0; k < alphas_.size(); ++k) {
			const double dist = std::abs(std::log(alphas_[k]) - std::log(alpha));
			if (dist < best_dist) {
				best_dist = dist;
				best = k;
			}
		}
		weights_.setZero();
		weights_[best] = 1.0;
		Eigen::MatrixXd x = standardized(x_raw);
		finalize(x, y);
	}

	double predict(const Eigen::VectorXd& x_row_raw) const {
		return standardize_row(x_row_raw).dot(coef_std_avg_);
	}

	// Weight-averaged leverage x*' (X'X + a_k I)^-1 x* at a raw feature row.
	double leverage(const Eigen::VectorXd& x_row_raw) const {
		const Eigen::VectorXd z = v_.transpose() * standardize_row(x_row_raw);
		double h = 0.0;
		for (int k = 0; k < alphas_.size(); ++k) {
			if (weights_[k] == 0.0) continue;
			double hk = 0.0;
			for (int j = 0; j < d_.size(); ++j) {
				hk += z[j] * z[j] / (d_[j] * d_[j] + alphas_[k]);
			}
			h += weights_[k] * hk;
		}
		return h;
	}

	// Averaged coefficients mapped back to the raw feature space.
	Eigen::VectorXd coef_raw() const { return map_back(coef_std_avg_); }
	Eigen::VectorXd coef_raw_at(int k) const { return map_back(coefs_std_.col(k)); }
	const Eigen::VectorXd& coef_std_avg() const { return coef_std_avg_; }
	const Eigen::MatrixXd& coefs_std() const { return coefs_std_; }

	const Eigen::VectorXd& alphas() const { return alphas_; }
	const Eigen::VectorXd& gcv() const { return gcv_; }
	const Eigen::VectorXd& weights() const { return weights_; }
	const std::vector<double>& loo_residuals() const { return loo_residuals_; }
	double gcv_min() const { return gcv_.minCoeff(); }
	int n_rows() const { return n_; }

	// Hat-matrix trace at grid point k (exposed for the GCV correctness oracle).
	double trace_hat(int k) const {
		double t = 0.0;
		for (int j = 0; j < d_.size(); ++j) {
			const double d2 = d_[j] * d_[j];
			t += d2 / (d2 + alphas_[k]);
		}
		return t;
	}

private:
	Eigen::MatrixXd standardized(const Eigen::MatrixXd& x_raw) const {
		Eigen::MatrixXd x = x_raw;
		for (int j = 1; j < p_; ++j) {
			x.col(j).array() -= means_[j];
			x.col(j) /= stds_[j];
		}
		return x;
	}

	Eigen::VectorXd standardize_row(const Eigen::VectorXd& x_row_raw) const {
		Eigen::VectorXd z = x_row_raw;
		for (int j = 1; j < p_; ++j) {
			z[j] = (z[j] - means_[j]) / stds_[j];
		}
		return z;
	}

	Eigen::VectorXd map_back(const Eigen::VectorXd& coef_std) const {
		Eigen::VectorXd raw = coef_std;
		for (int j = 1; j < p_; ++j) {
			raw[j] = coef_std[j] / stds_[j];
			raw[0] -= coef_std[j] * means_[j] / stds_[j];
		}
		return raw;
	}

	void finalize(const Eigen::MatrixXd& x_std, const Eigen::VectorXd& y) {
		coef_std_avg_ = coefs_std_ * weights_;
		// Weight-averaged hat diagonal for the leave-one-out residuals.
		const int r = static_cast<int>(d_.size());
		Eigen::VectorXd hbar = Eigen::VectorXd::Zero(n_);
		for (int k = 0; k < alphas_.size(); ++k) {
			if (weights_[k] == 0.0) continue;
			Eigen::VectorXd shrink2(r);
			for (int j = 0; j < r; ++j) {
				const double d2 = d_[j] * d_[j];
				shrink2[j] = d2 / (d2 + alphas_[k]);
			}
			hbar += weights_[k] * (u_.array().square().matrix() * shrink2);
		}
		const Eigen::VectorXd fitted = x_std * coef_std_avg_;
		loo_residuals_.resize(n_);
		for (int i = 0; i < n_; ++i) {
			const double denom = std::max(1.0 - hbar[i], 1e-8);
			loo_residuals_[i] = (y[i] - fitted[i]) / denom;
		}
	}

	int n_;
	int p_;
	Eigen::VectorXd means_;
	Eigen::VectorXd stds_;
	Eigen::MatrixXd u_;
	Eigen::MatrixXd v_;
	Eigen::VectorXd d_;
	Eigen::VectorXd uty_;
	Eigen::VectorXd alphas_;
	Eigen::MatrixXd coefs_std_;
	Eigen::VectorXd gcv_;
	Eigen::VectorXd weights_;
	Eigen::VectorXd coef_std_avg_;
	std::vector<double> loo_residuals_;
};

}  // namespace flair
