#pragma once

// Serial reference versions of the kernels in gurevic/kernels.hpp.

#include "gurevic/kernels.hpp"

namespace gurevic::reference {

void matvec(const DenseMatrix& m, std::span<const double> x, std::span<double> y);
void left_matvec(const DenseMatrix& m, std::span<const double> x, std::span<double> y);
void ball_step(const BallStep& step, std::span<const double> in, std::span<double> out,
               int max_length);
void ball_step_accumulate(const BallStep& step, std::span<const double> edge_values,
                          std::span<const double> in_mass, std::span<const double> in_acc,
                          std::span<double> out_mass, std::span<double> out_acc, int max_length);
double gather_dot(std::span<const double> a, std::span<const double> b,
                  std::span<const std::int32_t> index);
std::vector<double> torus_trace_moments(const DenseMatrix& base,
                                        const std::vector<std::vector<std::int64_t>>& f, int q,
                                        int n_max, std::span<const std::int64_t> target);

}  // namespace gurevic::reference
