#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace k4f {

// phi as a function of Phi: exp(-Phi^5 / 2).
double phi_of(double Phi) noexcept;

// Phi on a uniform grid over [0, x_max]; Phi' = exp(-Phi^5/2), Phi(0) = 0.
class TrajectoryTable {
public:
    TrajectoryTable(double step, std::vector<double> Phi_values);

    double step() const noexcept { return h_; }
    double x_max() const noexcept { return h_ * static_cast<double>(Phi_.size() - 1); }
    std::size_t size() const noexcept { return Phi_.size(); }

    double x_at(std::size_t k) const noexcept { return h_ * static_cast<double>(k); }
    std::span<const double> Phi_values() const noexcept { return Phi_; }
    std::span<const double> phi_values() const noexcept { return phi_; }

    // Cubic Hermite interpolation using phi as the exact derivative.
    // Throws DomainError outside [0, x_max].
    double Phi(double x) const;
    double phi(double x) const;

private:
    double h_;
    std::vector<double> Phi_;
    std::vector<double> phi_;
};

// Classical RK4 with fixed step h. Throws NumericError on a non-finite state.
TrajectoryTable solve_ode(double x_max, double h = 1e-3);

// Closed forms at a given (Phi, phi) pair; the table-backed accessors below
// delegate here.
double x_formula(double n, int j, double Phi, double phi);
double y_formula(double n, double t, int j, double Phi, double phi);

// Trajectory quantities of the staged process for fixed n, eps1, eps2.
class TrajectoryModel {
public:
    TrajectoryModel(double n, double eps1, double eps2, const TrajectoryTable& table);

    double n() const noexcept { return n_; }
    double scaled_time(long i) const noexcept;   // i * n^{-eps1}

    double Phi_at(long i) const;
    double phi_at(long i) const;

    double x_ij(long i, int j) const;
    double y_ijt(long i, int j, double t) const;
    double z_ij(long i, int j) const;

    // log of the product term inside gamma_i:
    //   sum_j -6000 z_{i,j} log(1 - 2 n^{-(eps1+eps2) j})
    double gamma_exponent(long i) const;
    double gamma(long i) const;
    // log(1 + gamma_i), finite even when gamma_i overflows.
    double log1p_gamma(long i) const;

    // Gamma_0 = n^{-eps1}; Gamma_i = Gamma_{i-1} (1 + gamma_{i-1}).
    double log_Gamma(long i) const;
    double Gamma(long i) const;
    std::vector<double> log_Gamma_series(long last) const;

private:
    double n_;
    double eps1_;
    double eps2_;
    const TrajectoryTable* table_;
};

// Bohman's tracked forms in terms of the current edge count m.
double bohman_open(double n, double m);
double bohman_x(double n, double m, int j);

double binomial(int a, int b) noexcept;

} // namespace k4f
