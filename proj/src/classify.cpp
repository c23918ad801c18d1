#include "lsksvd/classify.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <stdexcept>

#include "lsksvd/pursuit.hpp"

namespace lsksvd {

Classification classify_patch(const Eigen::VectorXd& patch, const Dictionary& d1,
                              const Dictionary& d2, const CorrelationMatrix& c1,
                              const CorrelationMatrix& c2, int rho, ScoreNorm norm) {
    if (d1.k() != d2.k() || patch.size() != d1.k()) {
        throw std::invalid_argument("classify_patch: geometry mismatch");
    }
    const Eigen::VectorXd e1 = patch - d1.atoms * omp(d1, patch, rho).coefficients;
    const Eigen::VectorXd e2 = patch - d2.atoms * omp(d2, patch, rho).coefficients;

    double q1 = 0.0, q2 = 0.0;
    if (norm == ScoreNorm::correlation) {
        q1 = mahalanobis_diag(e1, c1)[0];
        q2 = mahalanobis_diag(e2, c2)[0];
    } else {
        q1 = e1.squaredNorm();
        q2 = e2.squaredNorm();
    }
    Classification out;
    out.score = q2 - q1;
    out.label = out.score > 0.0 ? 1 : 2; // ties go to class 2
    return out;
}

RocCurve roc_curve(const std::vector<double>& scores, const std::vector<int>& labels) {
    if (scores.size() != labels.size()) {
        throw std::invalid_argument("roc_curve: scores/labels length mismatch");
    }
    size_t n_pos = 0, n_neg = 0;
    for (int l : labels) (l == 1 ? n_pos : n_neg) += 1;
    if (n_pos == 0 || n_neg == 0) {
        throw std::invalid_argument("roc_curve: both classes must be present");
    }

    // Sort by score descending; sweep thresholds through the distinct values.
    std::vector<size_t> order(scores.size());
    for (size_t i = 0; i < order.size(); ++i) order[i] = i;
    std::sort(order.begin(), order.end(), [&](size_t a, size_t b) {
        if (scores[a] != scores[b]) return scores[a] > scores[b];
        return a < b;
    });

    RocCurve roc;
    const double inf = std::numeric_limits<double>::infinity();
    roc.points.push_back({inf, 0.0, 0.0});
    size_t tp = 0, fp = 0;
    size_t i = 0;
    while (i < order.size()) {
        const double value = scores[order[i]];
        // Counts so far cover samples with score strictly above this value,
        // which is exactly "predicted positive at threshold = value".
        roc.points.push_back({value, static_cast<double>(fp) / static_cast<double>(n_neg),
                              static_cast<double>(tp) / static_cast<double>(n_pos)});
        while (i < order.size() && scores[order[i]] == value) {
            (labels[order[i]] == 1 ? tp : fp) += 1;
            ++i;
        }
    }
    roc.points.push_back({-inf, 1.0, 1.0});

    roc.auc = 0.0;
    for (size_t p = 1; p < roc.points.size(); ++p) {
        const auto& a = roc.points[p - 1];
        const auto& b = roc.points[p];
        roc.auc += (b.fpr - a.fpr) * (a.tpr + b.tpr) * 0.5;
    }
    return roc;
}

std::string format_roc(const RocCurve& roc) {
    std::string out = "threshold\tfpr\ttpr\n";
    char line[128];
    for (const RocPoint& p : roc.points) {
        std::snprintf(line, sizeof(line), "%.17g\t%.8f\t%.8f\n", p.threshold, p.fpr, p.tpr);
        out += line;
    }
    std::snprintf(line, sizeof(line), "auc\t%.8f\n", roc.auc);
    out += line;
    return out;
}

} // namespace lsksvd
