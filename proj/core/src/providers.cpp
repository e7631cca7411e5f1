#include "jumplq/providers.hpp"

#include <algorithm>
#include <string>
#include <utility>

#include "jumplq/errors.hpp"

namespace jumplq {

TimeMatrixFn TimeMatrixFn::constant(Eigen::MatrixXd value) {
    TimeMatrixFn p;
    p.kind_ = Kind::Constant;
    p.rows_ = value.rows();
    p.cols_ = value.cols();
    p.constant_ = std::move(value);
    return p;
}

TimeMatrixFn TimeMatrixFn::analytic(Eigen::Index rows, Eigen::Index cols,
                                    std::function<Eigen::MatrixXd(double)> fn) {
    TimeMatrixFn p;
    p.kind_ = Kind::Analytic;
    p.rows_ = rows;
    p.cols_ = cols;
    p.fn_ = std::move(fn);
    return p;
}

TimeMatrixFn TimeMatrixFn::grid(std::vector<double> knots, std::vector<Eigen::MatrixXd> values) {
    if (knots.size() < 2) throw ConfigError("grid provider needs at least two knots");
    if (knots.size() != values.size())
        throw ConfigError("grid provider: knots and values differ in length");
    for (std::size_t i = 1; i < knots.size(); ++i)
        if (!(knots[i] > knots[i - 1]))
            throw ConfigError("grid provider knots must be strictly increasing");
    const Eigen::Index r = values.front().rows(), c = values.front().cols();
    for (const auto& v : values)
        if (v.rows() != r || v.cols() != c)
            throw DimensionMismatch("grid provider values have inconsistent shapes");
    TimeMatrixFn p;
    p.kind_ = Kind::Grid;
    p.rows_ = r;
    p.cols_ = c;
    p.grid_knots_ = std::make_shared<const std::vector<double>>(std::move(knots));
    p.grid_values_ = std::make_shared<const std::vector<Eigen::MatrixXd>>(std::move(values));
    return p;
}

TimeMatrixFn TimeMatrixFn::zero(Eigen::Index rows, Eigen::Index cols) {
    return constant(Eigen::MatrixXd::Zero(rows, cols));
}

void TimeMatrixFn::eval_into(double t, Eigen::MatrixXd& out) const {
    switch (kind_) {
        case Kind::Constant:
            out = constant_;
            return;
        case Kind::Analytic:
            out = fn_(t);
            if (out.rows() != rows_ || out.cols() != cols_)
                throw DimensionMismatch("analytic provider returned wrong shape at t=" +
                                        std::to_string(t));
            return;
        case Kind::Grid: {
            const auto& knots = *grid_knots_;
            const auto& values = *grid_values_;
            if (t < knots.front() || t > knots.back())
                throw TimeOutOfRange("grid provider evaluated at t=" + std::to_string(t) +
                                     " outside its knot range");
            const auto it = std::upper_bound(knots.begin(), knots.end(), t);
            std::size_t hi = static_cast<std::size_t>(it - knots.begin());
            if (hi == 0) hi = 1;
            if (hi == knots.size()) hi = knots.size() - 1;
            const std::size_t lo = hi - 1;
            const double w = (t - knots[lo]) / (knots[hi] - knots[lo]);
            out = (1.0 - w) * values[lo] + w * values[hi];
            return;
        }
        case Kind::Empty:
            throw ConfigError("evaluating an empty provider");
    }
}

Eigen::MatrixXd TimeMatrixFn::operator()(double t) const {
    Eigen::MatrixXd out;
    eval_into(t, out);
    return out;
}

TimeMatrixFn TimeMatrixFn::symmetrized() const {
    if (rows_ != cols_) throw DimensionMismatch("cannot symmetrize a non-square provider");
    switch (kind_) {
        case Kind::Constant:
            return constant(0.5 * (constant_ + constant_.transpose()).eval());
        case Kind::Grid: {
            std::vector<Eigen::MatrixXd> values;
            values.reserve(grid_values_->size());
            for (const auto& v : *grid_values_)
                values.push_back(0.5 * (v + v.transpose()));
            return grid(*grid_knots_, std::move(values));
        }
        case Kind::Analytic: {
            auto inner = fn_;
            return analytic(rows_, cols_, [inner](double t) {
                const Eigen::MatrixXd m = inner(t);
                return (0.5 * (m + m.transpose())).eval();
            });
        }
        case Kind::Empty:
            throw ConfigError("symmetrizing an empty provider");
    }
    return {};
}

TimeMatrixFn TimeMatrixFn::shifted(const TimeMatrixFn& shift) const {
    if (rows_ != shift.rows() || cols_ != shift.cols())
        throw DimensionMismatch("shifted(): shape mismatch");
    if (kind_ == Kind::Constant && shift.kind_ == Kind::Constant)
        return constant(constant_ + shift.constant_);
    const TimeMatrixFn self = *this;
    const TimeMatrixFn other = shift;
    return analytic(rows_, cols_,
                    [self, other](double t) { return (self(t) + other(t)).eval(); });
}

}  // namespace jumplq
