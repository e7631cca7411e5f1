#pragma once

#include <Eigen/Core>
#include <functional>
#include <memory>
#include <vector>

namespace jumplq {

/// A matrix-valued function of time. Three provider kinds:
///  - constant:  one matrix for all t
///  - analytic:  an arbitrary callable
///  - grid:      values at strictly increasing knots, linearly interpolated;
///               evaluation outside the knot range is an error (no
///               extrapolation)
class TimeMatrixFn {
public:
    TimeMatrixFn() = default;

    static TimeMatrixFn constant(Eigen::MatrixXd value);
    static TimeMatrixFn analytic(Eigen::Index rows, Eigen::Index cols,
                                 std::function<Eigen::MatrixXd(double)> fn);
    static TimeMatrixFn grid(std::vector<double> knots, std::vector<Eigen::MatrixXd> values);

    /// Zero matrix of the given shape.
    static TimeMatrixFn zero(Eigen::Index rows, Eigen::Index cols);

    Eigen::MatrixXd operator()(double t) const;
    void eval_into(double t, Eigen::MatrixXd& out) const;

    Eigen::Index rows() const { return rows_; }
    Eigen::Index cols() const { return cols_; }
    bool is_constant() const { return kind_ == Kind::Constant; }
    bool valid() const { return kind_ != Kind::Empty; }

    /// Provider returning the symmetrized evaluation (M + M^T)/2.
    /// `max_asymmetry` (if non-null) receives the largest relative asymmetry
    /// seen while sampling `probe_times`.
    TimeMatrixFn symmetrized() const;

    /// Provider returning this(t) + shift(t) (shapes must match).
    TimeMatrixFn shifted(const TimeMatrixFn& shift) const;

private:
    enum class Kind { Empty, Constant, Analytic, Grid };

    Kind kind_ = Kind::Empty;
    Eigen::Index rows_ = 0, cols_ = 0;
    Eigen::MatrixXd constant_;
    std::function<Eigen::MatrixXd(double)> fn_;
    std::shared_ptr<const std::vector<double>> grid_knots_;
    std::shared_ptr<const std::vector<Eigen::MatrixXd>> grid_values_;
};

}  // namespace jumplq
