#pragma once

#include <span>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "persona_lab/dpr/routing.hpp"
#include "persona_lab/ingest/bundle.hpp"
#include "persona_lab/ingest/report.hpp"
#include "persona_lab/metrics/effects.hpp"

namespace persona_lab::ingest {

// Report builders for each research question. Every builder is a pure
// function of the bundle, so repeated runs produce identical bytes.

/// rq1_mean_delta (signed mean delta over the cross-architecture subset) and
/// rq1_direction_consistency (SA); rows are the ten polarity conditions,
/// columns the datasets.
std::vector<ReportTable> rq1_reports(const StudyBundle& bundle);

/// rq2_sensitivity (per model and dataset), rq2_scaling_trends (per family
/// with >= 3 scales) and rq2_domain_effects (persona x domain group).
std::vector<ReportTable> rq2_reports(const StudyBundle& bundle);

/// rq3_trait_dominance: Trait, Impact, AvgGap, Uniformity, Rank.
std::vector<ReportTable> rq3_reports(const StudyBundle& bundle);
ReportTable trait_dominance_table(const metrics::AccuracyTable& table);

/// rq4_consistency (per-trait and overall rates) and rq4_comparisons.
std::vector<ReportTable> rq4_reports(const StudyBundle& bundle);

/// Per-item routing CSV: item_id, anchor_id, similarity, recommended_set, hit, fallback.
ReportTable routing_report_table(const dpr::RoutingReport& report);

/// {dataset: {Total, Sampled, Correct, Accuracy, BestBaseline}}.
nlohmann::ordered_json routing_summary_json(std::span<const dpr::RoutingReport> reports);

/// Extra per-dataset figures: best persona, BASE accuracy, oracle bound, fallbacks.
nlohmann::ordered_json routing_details_json(std::span<const dpr::RoutingReport> reports);

}  // namespace persona_lab::ingest
