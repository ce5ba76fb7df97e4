#include "radar/error.hpp"
#include "radar/learning.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace radar {

NaiveBayesModel fit_naive_bayes(const SparseMatrix& x, std::span<const std::uint8_t> y, const Hyperparameters& hyper) {
    const std::size_t d = x.cols();
    std::array<double, 2> count{};
    for (auto v : y) count[v ? 1 : 0] += 1.0;
    if (count[0] == 0 || count[1] == 0) throw DegenerateLabels("naive Bayes needs both classes in the training set");

    NaiveBayesModel m;
    m.variant = hyper.nb_variant;
    const double n = count[0] + count[1];
    for (int c = 0; c < 2; ++c) m.log_prior[c] = std::log(count[c] / n);

    if (m.variant == NbVariant::multinomial) {
        std::array<std::vector<double>, 2> totals{std::vector<double>(d, 0.0), std::vector<double>(d, 0.0)};
        for (std::size_t i = 0; i < x.rows(); ++i) {
            const auto r = x.row(i);
            for (std::size_t k = 0; k < r.indices.size(); ++k) {
                if (r.values[k] < 0) throw InvalidArgument("multinomial naive Bayes needs non-negative features");
                totals[y[i] ? 1 : 0][r.indices[k]] += r.values[k];
            }
        }
        for (int c = 0; c < 2; ++c) {
            double sum = 0.0;
            for (double t : totals[c]) sum += t + hyper.nb_alpha;
            m.feature_log_prob[c].resize(d);
            for (std::size_t j = 0; j < d; ++j) m.feature_log_prob[c][j] = std::log((totals[c][j] + hyper.nb_alpha) / sum);
        }
        return m;
    }

    std::array<std::vector<double>, 2> sum{std::vector<double>(d, 0.0), std::vector<double>(d, 0.0)};
    std::vector<double> all_sum(d, 0.0);
    for (std::size_t i = 0; i < x.rows(); ++i) {
        const auto r = x.row(i);
        for (std::size_t k = 0; k < r.indices.size(); ++k) {
            sum[y[i] ? 1 : 0][r.indices[k]] += r.values[k];
            all_sum[r.indices[k]] += r.values[k];
        }
    }
    for (int c = 0; c < 2; ++c) {
        m.mean[c].resize(d);
        for (std::size_t j = 0; j < d; ++j) m.mean[c][j] = sum[c][j] / count[c];
    }
    std::vector<double> all_mean(d);
    for (std::size_t j = 0; j < d; ++j) all_mean[j] = all_sum[j] / n;

    // Two-pass variance; implicit zeros contribute mean^2 each.
    std::array<std::vector<double>, 2> sq{std::vector<double>(d, 0.0), std::vector<double>(d, 0.0)};
    std::array<std::vector<double>, 2> nnz{std::vector<double>(d, 0.0), std::vector<double>(d, 0.0)};
    std::vector<double> all_sq(d, 0.0), all_nnz(d, 0.0);
    for (std::size_t i = 0; i < x.rows(); ++i) {
        const int c = y[i] ? 1 : 0;
        const auto r = x.row(i);
        for (std::size_t k = 0; k < r.indices.size(); ++k) {
            const auto j = r.indices[k];
            const double dc = r.values[k] - m.mean[c][j];
            const double da = r.values[k] - all_mean[j];
            sq[c][j] += dc * dc;
            nnz[c][j] += 1.0;
            all_sq[j] += da * da;
            all_nnz[j] += 1.0;
        }
    }
    double max_var = 0.0;
    for (std::size_t j = 0; j < d; ++j) {
        const double v = (all_sq[j] + (n - all_nnz[j]) * all_mean[j] * all_mean[j]) / n;
        max_var = std::max(max_var, v);
    }
    m.epsilon = hyper.var_smoothing * (max_var > 0.0 ? max_var : 1.0);
    for (int c = 0; c < 2; ++c) {
        m.var[c].resize(d);
        for (std::size_t j = 0; j < d; ++j) {
            const double mu = m.mean[c][j];
            m.var[c][j] = (sq[c][j] + (count[c] - nnz[c][j]) * mu * mu) / count[c] + m.epsilon;
        }
    }
    return m;
}

namespace {

// Joint log-likelihood of a sparse row: the all-zero baseline plus the
// correction for each stored value.
struct GaussianScorer {
    const NaiveBayesModel& m;
    std::array<double, 2> baseline{};

    explicit GaussianScorer(const NaiveBayesModel& model) : m(model) {
        for (int c = 0; c < 2; ++c) {
            double b = m.log_prior[c];
            for (std::size_t j = 0; j < m.mean[c].size(); ++j) {
                b += -0.5 * std::log(2.0 * std::numbers::pi * m.var[c][j]) -
                     m.mean[c][j] * m.mean[c][j] / (2.0 * m.var[c][j]);
            }
            baseline[c] = b;
        }
    }

    double joint(int c, RowView r) const {
        double s = baseline[c];
        for (std::size_t k = 0; k < r.indices.size(); ++k) {
            const auto j = r.indices[k];
            const double mu = m.mean[c][j];
            const double v = m.var[c][j];
            const double dx = r.values[k] - mu;
            s += (mu * mu - dx * dx) / (2.0 * v);
        }
        return s;
    }
};

} // namespace

std::vector<double> naive_bayes_proba(const NaiveBayesModel& m, const SparseMatrix& rows, Exec exec) {
    std::vector<double> out(rows.rows());
    auto posterior = [](double j0, double j1) {
        const double hi = std::max(j0, j1);
        const double e0 = std::exp(j0 - hi);
        const double e1 = std::exp(j1 - hi);
        return e1 / (e0 + e1);
    };
    if (m.variant == NbVariant::multinomial) {
        parallel_for(exec, rows.rows(), [&](std::size_t i) {
            const auto r = rows.row(i);
            std::array<double, 2> jll = m.log_prior;
            for (int c = 0; c < 2; ++c) {
                for (std::size_t k = 0; k < r.indices.size(); ++k) {
                    jll[c] += r.values[k] * m.feature_log_prob[c][r.indices[k]];
                }
            }
            out[i] = posterior(jll[0], jll[1]);
        });
        return out;
    }
    const GaussianScorer scorer(m);
    parallel_for(exec, rows.rows(), [&](std::size_t i) {
        const auto r = rows.row(i);
        out[i] = posterior(scorer.joint(0, r), scorer.joint(1, r));
    });
    return out;
}

} // namespace radar
