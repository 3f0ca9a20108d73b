#include "k4f/trajectory.hpp"

#include "k4f/errors.hpp"

#include <cmath>
#include <string>

namespace k4f {

double phi_of(double Phi) noexcept
{
    const double p2 = Phi * Phi;
    return std::exp(-0.5 * p2 * p2 * Phi);
}

double binomial(int a, int b) noexcept
{
    if (b < 0 || b > a)
        return 0.0;
    double r = 1.0;
    for (int k = 1; k <= b; ++k)
        r = r * (a - b + k) / k;
    return r;
}

TrajectoryTable::TrajectoryTable(double step, std::vector<double> Phi_values)
    : h_(step), Phi_(std::move(Phi_values))
{
    if (!(h_ > 0) || Phi_.size() < 2)
        throw ConfigError("trajectory table needs a positive step and at least two points");
    phi_.resize(Phi_.size());
    for (std::size_t k = 0; k < Phi_.size(); ++k)
        phi_[k] = phi_of(Phi_[k]);
}

double TrajectoryTable::Phi(double x) const
{
    const double xmax = x_max();
    if (!(x >= 0.0) || x > xmax * (1 + 1e-15))
        throw DomainError("x = " + std::to_string(x) + " outside trajectory table [0, " + std::to_string(xmax) + "]");
    const double pos = x / h_;
    auto k = static_cast<std::size_t>(pos);
    if (k >= Phi_.size() - 1)
        k = Phi_.size() - 2;
    const double s = pos - static_cast<double>(k);
    if (s == 0.0)
        return Phi_[k];
    const double s2 = s * s, s3 = s2 * s;
    const double h00 = 2 * s3 - 3 * s2 + 1, h10 = s3 - 2 * s2 + s;
    const double h01 = -2 * s3 + 3 * s2, h11 = s3 - s2;
    return h00 * Phi_[k] + h10 * h_ * phi_[k] + h01 * Phi_[k + 1] + h11 * h_ * phi_[k + 1];
}

double TrajectoryTable::phi(double x) const { return phi_of(Phi(x)); }

TrajectoryTable solve_ode(double x_max, double h)
{
    if (!(x_max > 0) || !(h > 0))
        throw ConfigError("solve_ode: x_max and step must be positive");
    const auto steps = static_cast<std::size_t>(std::llround(x_max / h));
    if (steps == 0)
        throw ConfigError("solve_ode: step larger than range");
    std::vector<double> Phi(steps + 1);
    Phi[0] = 0.0;
    double y = 0.0;
    for (std::size_t k = 0; k < steps; ++k) {
        const double k1 = phi_of(y);
        const double k2 = phi_of(y + 0.5 * h * k1);
        const double k3 = phi_of(y + 0.5 * h * k2);
        const double k4 = phi_of(y + h * k3);
        y += h / 6.0 * (k1 + 2 * k2 + 2 * k3 + k4);
        if (!std::isfinite(y))
            throw NumericError("solve_ode: non-finite state at step " + std::to_string(k));
        Phi[k + 1] = y;
    }
    return TrajectoryTable(h, std::move(Phi));
}

double x_formula(double n, int j, double Phi, double phi)
{
    if (j < 0 || j > 5)
        throw DomainError("x_{i,j}: j must be in [0,5]");
    const double pairs = n * (n - 1) / 2;
    return pairs * binomial(5, j) * std::pow(Phi / std::pow(n, 0.4), 5 - j) * std::pow(phi, j);
}

double y_formula(double n, double t, int j, double Phi, double phi)
{
    if (j < 0 || j > 3)
        throw DomainError("y_{i,j,t}: j must be in [0,3]");
    return t * binomial(3, j) * std::pow(Phi / std::pow(n, 0.4), 3 - j) * std::pow(phi, j);
}

TrajectoryModel::TrajectoryModel(double n, double eps1, double eps2, const TrajectoryTable& table)
    : n_(n), eps1_(eps1), eps2_(eps2), table_(&table)
{
    if (!(n >= 4) || !(eps1 > 0) || !(eps2 > 0))
        throw ConfigError("trajectory model: need n >= 4 and positive eps1, eps2");
}

double TrajectoryModel::scaled_time(long i) const noexcept
{
    return static_cast<double>(i) * std::pow(n_, -eps1_);
}

double TrajectoryModel::Phi_at(long i) const
{
    if (i < 0)
        throw DomainError("round index must be nonnegative");
    return table_->Phi(scaled_time(i));
}

double TrajectoryModel::phi_at(long i) const { return phi_of(Phi_at(i)); }

double TrajectoryModel::x_ij(long i, int j) const
{
    const double P = Phi_at(i);
    return x_formula(n_, j, P, phi_of(P));
}

double TrajectoryModel::y_ijt(long i, int j, double t) const
{
    const double P = Phi_at(i);
    return y_formula(n_, t, j, P, phi_of(P));
}

double TrajectoryModel::z_ij(long i, int j) const
{
    return std::pow(n_, (eps2_ - 0.4) * j) * x_ij(i, j);
}

double TrajectoryModel::gamma_exponent(long i) const
{
    double s = 0.0;
    for (int j = 1; j <= 5; ++j) {
        const double delta = 2 * std::pow(n_, -(eps1_ + eps2_) * j);
        if (!(delta < 1.0))
            throw DomainError("gamma: base 1 - 2 n^{-(eps1+eps2) j} is not positive for j = " + std::to_string(j));
        s += -6000.0 * z_ij(i, j) * std::log1p(-delta);
    }
    return s;
}

double TrajectoryModel::gamma(long i) const { return 2.0 * std::expm1(gamma_exponent(i)); }

double TrajectoryModel::log1p_gamma(long i) const
{
    const double s = gamma_exponent(i);
    if (s < 30.0)
        return std::log1p(2.0 * std::expm1(s));
    // 1 + 2(e^s - 1) = 2 e^s (1 - e^{-s}/2)
    return s + std::log(2.0) + std::log1p(-0.5 * std::exp(-s));
}

double TrajectoryModel::log_Gamma(long i) const
{
    if (i < 0)
        throw DomainError("round index must be nonnegative");
    double lg = -eps1_ * std::log(n_);
    for (long k = 0; k < i; ++k)
        lg += log1p_gamma(k);
    return lg;
}

double TrajectoryModel::Gamma(long i) const { return std::exp(log_Gamma(i)); }

std::vector<double> TrajectoryModel::log_Gamma_series(long last) const
{
    std::vector<double> out;
    out.reserve(static_cast<std::size_t>(last + 1));
    double lg = -eps1_ * std::log(n_);
    for (long k = 0; k <= last; ++k) {
        out.push_back(lg);
        if (k < last)
            lg += log1p_gamma(k);
    }
    return out;
}

double bohman_open(double n, double m)
{
    const double r = m * std::pow(n, -1.6);
    return 0.5 * n * n * std::exp(-16.0 * std::pow(r, 5));
}

double bohman_x(double n, double m, int j)
{
    if (j < 0 || j > 5)
        throw DomainError("bohman_x: j must be in [0,5]");
    const double r = m * std::pow(n, -1.6);
    return std::pow(n, 0.4 * j) * std::pow(2.0, 4 - j) * binomial(5, j) * std::pow(r, 5 - j) *
           std::exp(-16.0 * j * std::pow(r, 5));
}

} // namespace k4f
