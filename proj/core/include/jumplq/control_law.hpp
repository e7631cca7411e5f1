#pragma once

#include <Eigen/Core>
#include <memory>
#include <string>
#include <utility>
#include <vector>

#include "jumplq/riccati.hpp"

namespace jumplq {

/// Admissible-control abstraction. Deterministic laws (zero, open-loop
/// tables, basis spikes, superpositions) ignore the state argument; feedback
/// laws apply a gain to the supplied left-limit state.
///
/// The simulator calls value(t, x_minus) with
///   - t = interval left endpoint, x_minus = state at that knot, for the
///     drift/diffusion part of a step, and
///   - t = jump time, x_minus = pre-jump state, for the jump update,
/// so feedback laws realize u(s) = Theta(s) X(s-).
class ControlLaw {
public:
    enum class Kind { Zero, OpenLoop, Feedback, BasisSpike };

    ControlLaw() = default;

    static ControlLaw zero(int m);
    static ControlLaw constant(Eigen::VectorXd u);
    /// Piecewise-constant-from-the-left table: value at t is the entry of
    /// the last knot <= t. Throws TimeOutOfRange left of the first knot.
    static ControlLaw table(std::vector<double> knots, std::vector<Eigen::VectorXd> values);
    /// amplitude * e_coord on the interval [t_lo, t_hi), zero elsewhere.
    static ControlLaw basis_spike(int m, double t_lo, double t_hi, int coord, double amplitude);
    static ControlLaw feedback(std::shared_ptr<const RiccatiSolution> solution);
    static ControlLaw feedback_gain(Eigen::MatrixXd theta);
    /// Linear combination of deterministic laws (used for polarization).
    static ControlLaw superpose(std::vector<std::pair<double, ControlLaw>> terms);

    void value_into(double t, const Eigen::VectorXd& x_minus, Eigen::VectorXd& out) const;
    Eigen::VectorXd value(double t, const Eigen::VectorXd& x_minus) const;

    Kind kind() const { return kind_; }
    int dim() const { return m_; }
    bool state_dependent() const { return kind_ == Kind::Feedback; }
    std::string describe() const;

private:
    Kind kind_ = Kind::Zero;
    int m_ = 0;

    // open-loop table
    std::shared_ptr<const std::vector<double>> knots_;
    std::shared_ptr<const std::vector<Eigen::VectorXd>> values_;
    // spike
    double spike_lo_ = 0.0, spike_hi_ = 0.0, spike_amp_ = 0.0;
    int spike_coord_ = 0;
    // feedback
    std::shared_ptr<const RiccatiSolution> solution_;
    std::shared_ptr<const Eigen::MatrixXd> gain_;
    // superposition
    std::shared_ptr<const std::vector<std::pair<double, ControlLaw>>> terms_;
};

}  // namespace jumplq
