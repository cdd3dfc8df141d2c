#include "textfeat/error.hpp"
#include "textfeat/stats.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace textfeat {

namespace {

double pearson(const std::vector<double>& x, const std::vector<double>& y) {
    const double n = static_cast<double>(x.size());
    const double mx = std::accumulate(x.begin(), x.end(), 0.0) / n;
    const double my = std::accumulate(y.begin(), y.end(), 0.0) / n;
    double sxy = 0.0;
    double sxx = 0.0;
    double syy = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double dx = x[i] - mx;
        const double dy = y[i] - my;
        sxy += dx * dy;
        sxx += dx * dx;
        syy += dy * dy;
    }
    if (sxx == 0.0 || syy == 0.0) throw StatsError("correlation undefined: zero variance");
    return std::clamp(sxy / std::sqrt(sxx * syy), -1.0, 1.0);
}

// Average ranks, ties share the mean of their positions.
std::vector<double> ranks(const std::vector<double>& v) {
    std::vector<std::size_t> order(v.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(), [&](auto a, auto b) { return v[a] < v[b]; });
    std::vector<double> out(v.size());
    for (std::size_t i = 0; i < order.size();) {
        std::size_t j = i;
        while (j + 1 < order.size() && v[order[j + 1]] == v[order[i]]) ++j;
        const double rank = (static_cast<double>(i) + static_cast<double>(j)) / 2.0 + 1.0;
        for (std::size_t k = i; k <= j; ++k) out[order[k]] = rank;
        i = j + 1;
    }
    return out;
}

}  // namespace

double correlate(std::span<const std::optional<double>> x, std::span<const std::optional<double>> y,
                 CorrelationMethod method) {
    if (x.size() != y.size()) throw StatsError("correlation inputs differ in length");
    std::vector<double> xs;
    std::vector<double> ys;
    for (std::size_t i = 0; i < x.size(); ++i) {
        if (x[i] && y[i]) {
            xs.push_back(*x[i]);
            ys.push_back(*y[i]);
        }
    }
    if (xs.size() < 3) throw StatsError("correlation needs at least three complete pairs");
    if (method == CorrelationMethod::Spearman) return pearson(ranks(xs), ranks(ys));
    return pearson(xs, ys);
}

std::vector<std::optional<double>> numeric_values(const Column& column) {
    if (column.kind() == ColumnKind::Text) {
        throw StatsError("column '" + column.name() + "' is text, not numeric or ordinal");
    }
    std::vector<std::optional<double>> out(column.size());
    for (std::size_t r = 0; r < column.size(); ++r) out[r] = column.number(r);
    return out;
}

}  // namespace textfeat
