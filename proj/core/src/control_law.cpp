#include "jumplq/control_law.hpp"

#include <algorithm>
#include <stdexcept>

#include "jumplq/errors.hpp"

namespace jumplq {

ControlLaw ControlLaw::zero(int m) {
    ControlLaw law;
    law.kind_ = Kind::Zero;
    law.m_ = m;
    return law;
}

ControlLaw ControlLaw::constant(Eigen::VectorXd u) {
    return table({0.0}, {std::move(u)});
}

ControlLaw ControlLaw::table(std::vector<double> knots, std::vector<Eigen::VectorXd> values) {
    if (knots.empty() || knots.size() != values.size())
        throw ConfigError("open-loop table: knots/values empty or mismatched");
    for (std::size_t i = 1; i < knots.size(); ++i)
        if (!(knots[i] > knots[i - 1]))
            throw ConfigError("open-loop table knots must be strictly increasing");
    ControlLaw law;
    law.kind_ = Kind::OpenLoop;
    law.m_ = static_cast<int>(values.front().size());
    for (const auto& v : values)
        if (v.size() != law.m_) throw DimensionMismatch("open-loop table value size mismatch");
    law.knots_ = std::make_shared<const std::vector<double>>(std::move(knots));
    law.values_ = std::make_shared<const std::vector<Eigen::VectorXd>>(std::move(values));
    return law;
}

ControlLaw ControlLaw::basis_spike(int m, double t_lo, double t_hi, int coord, double amplitude) {
    if (coord < 0 || coord >= m) throw DimensionMismatch("spike coordinate out of range");
    if (!(t_hi > t_lo)) throw ConfigError("spike interval must be non-empty");
    if (!std::isfinite(amplitude)) throw ConfigError("spike amplitude must be finite");
    ControlLaw law;
    law.kind_ = Kind::BasisSpike;
    law.m_ = m;
    law.spike_lo_ = t_lo;
    law.spike_hi_ = t_hi;
    law.spike_coord_ = coord;
    law.spike_amp_ = amplitude;
    return law;
}

ControlLaw ControlLaw::feedback(std::shared_ptr<const RiccatiSolution> solution) {
    ControlLaw law;
    law.kind_ = Kind::Feedback;
    law.m_ = static_cast<int>(solution->theta.front().rows());
    law.solution_ = std::move(solution);
    return law;
}

ControlLaw ControlLaw::feedback_gain(Eigen::MatrixXd theta) {
    ControlLaw law;
    law.kind_ = Kind::Feedback;
    law.m_ = static_cast<int>(theta.rows());
    law.gain_ = std::make_shared<const Eigen::MatrixXd>(std::move(theta));
    return law;
}

ControlLaw ControlLaw::superpose(std::vector<std::pair<double, ControlLaw>> terms) {
    if (terms.empty()) throw ConfigError("superpose needs at least one term");
    ControlLaw law;
    law.kind_ = Kind::OpenLoop;
    law.m_ = terms.front().second.dim();
    for (const auto& [coef, term] : terms) {
        (void)coef;
        if (term.state_dependent())
            throw ConfigError("superpose only combines deterministic laws");
        if (term.dim() != law.m_) throw DimensionMismatch("superpose dimension mismatch");
    }
    law.terms_ = std::make_shared<const std::vector<std::pair<double, ControlLaw>>>(std::move(terms));
    return law;
}

void ControlLaw::value_into(double t, const Eigen::VectorXd& x_minus, Eigen::VectorXd& out) const {
    switch (kind_) {
        case Kind::Zero:
            out.setZero(m_);
            return;
        case Kind::OpenLoop: {
            if (terms_) {
                out.setZero(m_);
                Eigen::VectorXd part;
                for (const auto& [coef, term] : *terms_) {
                    term.value_into(t, x_minus, part);
                    out += coef * part;
                }
                return;
            }
            const auto& knots = *knots_;
            if (t < knots.front())
                throw TimeOutOfRange("open-loop table evaluated before its first knot");
            const auto it = std::upper_bound(knots.begin(), knots.end(), t);
            const std::size_t idx = static_cast<std::size_t>(it - knots.begin()) - 1;
            out = (*values_)[idx];
            return;
        }
        case Kind::BasisSpike:
            out.setZero(m_);
            if (t >= spike_lo_ && t < spike_hi_) out[spike_coord_] = spike_amp_;
            return;
        case Kind::Feedback:
            if (gain_) {
                out.noalias() = (*gain_) * x_minus;
            } else {
                out.noalias() = solution_->theta_at(t) * x_minus;
            }
            return;
    }
}

Eigen::VectorXd ControlLaw::value(double t, const Eigen::VectorXd& x_minus) const {
    Eigen::VectorXd out;
    value_into(t, x_minus, out);
    return out;
}

std::string ControlLaw::describe() const {
    switch (kind_) {
        case Kind::Zero: return "zero";
        case Kind::OpenLoop: return terms_ ? "open-loop (superposition)" : "open-loop table";
        case Kind::BasisSpike: return "basis spike";
        case Kind::Feedback: return gain_ ? "feedback (constant gain)" : "feedback (Riccati)";
    }
    return "?";
}

}  // namespace jumplq
