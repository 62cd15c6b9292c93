// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <filesystem>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "sepred/pipeline.hpp"

namespace sepred {

inline constexpr const char* kArtifactVersion = "0.1.0";

std::string fold_table_filename(ModelVariant v, CategorySelector c);
std::string model_dump_filename(ModelVariant v, CategorySelector c);

/// Fold table in the report shape: header
/// Folds,Loss,Acc,Precision,Recall,F1-score,Auc
/// then one 1-based row per fold and a final "Ave" row, 4 decimals.
std::string fold_table_csv(const CvReport& report);

/// Parses a fold_table_csv document back into rows + average (loss-free
/// reload of the human-readable table, 4-decimal precision).
struct ParsedFoldTable {
  std::vector<FoldMetrics> rows;
  FoldMetrics average;
};
ParsedFoldTable parse_fold_table_csv(const std::string& text);

/// Averaged metrics of one cell at full precision, with the indices of any
/// degenerate folds (zero-division guards) attached.
nlohmann::json cell_summary_json(const CvReport& report);

/// Comparison summary over every ablation cell, keyed variant then
/// category, plus the static random-forest reference block.
nlohmann::json ablation_summary_json(const AblationReport& report);

/// Run manifest: artifact version, command, effective configuration,
/// dataset fingerprint, and the list of emitted files. No volatile fields,
/// so identical runs serialize identically.
nlohmann::json run_manifest_json(const std::string& command,
                                 const std::map<std::string, std::string>& config,
                                 const std::string& dataset_fingerprint,
                                 const std::vector<std::string>& outputs);

/// Files are accumulated in memory and written only after every
/// computation has finished, so a partially written bundle never exists on
/// a success path.
struct ReportBundle {
  std::vector<std::pair<std::string, std::string>> files;  // name -> content

  void add(std::string name, std::string content);
};

void write_bundle(const std::filesystem::path& out_dir, const ReportBundle& bundle);

}  // namespace sepred
