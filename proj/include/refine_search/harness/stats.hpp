#pragma once

#include "refine_search/core/types.hpp"

#include <nlohmann/json.hpp>

#include <vector>

namespace refine_search::harness {

/// Fraction of traces with a hidden-correct node among node ids 1..j. One
/// trace per task. Throws "unevaluated trace" when a verdict inside the
/// prefix is missing, and on an empty trace set.
double pass_at_k(const std::vector<SearchTrace>& traces, int j);

/// Two-sided 95% Student t critical value: a table for df 1..200, a
/// Cornish-Fisher expansion beyond.
double t_critical_975(int df);

struct Interval {
    double mean = 0.0;
    double half_width = 0.0;
};

/// mean +- t * s / sqrt(n) with the sample standard deviation. Only
/// level = 0.95 is supported. Throws for fewer than two values.
Interval confidence_interval(const std::vector<double>& values, double level = 0.95);

struct CurvePoint {
    int j = 0;
    double mean = 0.0;
    double half_width = 0.0;
    std::vector<double> per_run;
};

struct ScalingCurve {
    std::string label;
    std::vector<CurvePoint> points;
};

/// Pass@j for j = 1..k for each run, then mean and interval across runs.
/// A single run yields a half-width of 0.
ScalingCurve scaling_curve(std::string label, const std::vector<std::vector<SearchTrace>>& runs, int k);

/// `j,mean,ci_half_width` rows.
std::string curve_csv(const ScalingCurve& curve);
nlohmann::json to_json(const ScalingCurve& curve);

}  // namespace refine_search::harness
