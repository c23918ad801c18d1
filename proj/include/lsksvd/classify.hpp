#pragma once

#include <Eigen/Core>
#include <vector>

#include "lsksvd/dictionary.hpp"
#include "lsksvd/error_stats.hpp"

namespace lsksvd {

/// Metric for the residual quadratic forms: correlation-weighted
/// (e^T C^{-1} e) or plain squared L2.
enum class ScoreNorm { correlation, l2 };

struct Classification {
    int label = 0;      // 1 or 2
    double score = 0.0; // q2 - q1; positive favors class 1
};

/// Approximate the patch with both dictionaries and compare the residual
/// quadratic forms; label 1 when the class-1 fit is strictly better, 2
/// otherwise (ties go to 2).
Classification classify_patch(const Eigen::VectorXd& patch, const Dictionary& d1,
                              const Dictionary& d2, const CorrelationMatrix& c1,
                              const CorrelationMatrix& c2, int rho,
                              ScoreNorm norm = ScoreNorm::correlation);

struct RocPoint {
    double threshold = 0.0;
    double fpr = 0.0;
    double tpr = 0.0;
};

/// Threshold sweep over the distinct score values plus +/-inf sentinels;
/// label 1 is the positive class, predicted positive when score > threshold.
/// points run from (0,0) to (1,1); auc is the trapezoidal area.
struct RocCurve {
    std::vector<RocPoint> points;
    double auc = 0.0;
};

RocCurve roc_curve(const std::vector<double>& scores, const std::vector<int>& labels);

/// Text rows (threshold, FPR, TPR) plus a final AUC summary line.
std::string format_roc(const RocCurve& roc);

} // namespace lsksvd
