// SPDX-License-Identifier: Apache-2.0
#include "sepred/report.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

#include "sepred/jsonio.hpp"

namespace sepred {

namespace {

std::string four_decimals(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.4f", v);
  return buf;
}

constexpr const char* kFoldTableHeader = "Folds,Loss,Acc,Precision,Recall,F1-score,Auc";

void append_metric_row(std::string& out, const std::string& id, const FoldMetrics& m) {
  out += id;
  for (double v : {m.loss, m.accuracy, m.precision, m.recall, m.f1, m.auc}) {
    out += ',';
    out += four_decimals(v);
  }
  out += '\n';
}

}  // namespace

std::string fold_table_filename(ModelVariant v, CategorySelector c) {
  return "cv_" + to_string(v) + "_" + to_string(c) + ".csv";
}

std::string model_dump_filename(ModelVariant v, CategorySelector c) {
  return "model_" + to_string(v) + "_" + to_string(c) + ".json";
}

std::string fold_table_csv(const CvReport& report) {
  std::string out = kFoldTableHeader;
  out += '\n';
  for (std::size_t i = 0; i < report.rows.size(); ++i) {
    append_metric_row(out, std::to_string(i + 1), report.rows[i]);
  }
  append_metric_row(out, "Ave", report.average);
  return out;
}

ParsedFoldTable parse_fold_table_csv(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  if (!std::getline(in, line) || line != kFoldTableHeader) {
    throw SchemaError("fold table: unexpected header: '" + line + "'");
  }
  ParsedFoldTable parsed;
  bool saw_average = false;
  std::size_t expected_fold = 1;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    if (saw_average) throw SchemaError("fold table: rows after the Ave row");
    std::istringstream cells(line);
    std::string id;
    std::getline(cells, id, ',');
    FoldMetrics m;
    for (double* field : {&m.loss, &m.accuracy, &m.precision, &m.recall, &m.f1, &m.auc}) {
      std::string cell;
      if (!std::getline(cells, cell, ',')) {
        throw ParseError("fold table: too few cells in row '" + line + "'");
      }
      *field = std::stod(cell);
    }
    if (id == "Ave") {
      parsed.average = m;
      saw_average = true;
    } else {
      if (id != std::to_string(expected_fold)) {
        throw SchemaError("fold table: expected fold " + std::to_string(expected_fold) +
                          ", got '" + id + "'");
      }
      ++expected_fold;
      parsed.rows.push_back(m);
    }
  }
  if (!saw_average) throw SchemaError("fold table: missing Ave row");
  return parsed;
}

nlohmann::json cell_summary_json(const CvReport& report) {
  nlohmann::json cell = {
      {"loss", report.average.loss},         {"accuracy", report.average.accuracy},
      {"precision", report.average.precision}, {"recall", report.average.recall},
      {"f1", report.average.f1},             {"auc", report.average.auc},
  };
  nlohmann::json degenerate = nlohmann::json::array();
  for (std::size_t i = 0; i < report.rows.size(); ++i) {
    if (report.rows[i].degenerate) degenerate.push_back(i + 1);  // 1-based, as in tables
  }
  cell["degenerate_folds"] = std::move(degenerate);
  return cell;
}

nlohmann::json ablation_summary_json(const AblationReport& report) {
  nlohmann::json cells;
  std::string fingerprint;
  std::size_t k = 0;
  std::uint64_t seed = 0;
  for (const auto& cell : report.cells) {
    cells[to_string(cell.variant)][to_string(cell.category)] =
        cell_summary_json(cell.report);
    fingerprint = cell.report.meta.dataset_fingerprint;
    k = cell.report.meta.k;
    seed = cell.report.meta.seed;
  }
  // Static published baseline for context; never recomputed.
  nlohmann::json reference = {
      {"precision", 0.89},
      {"recall", 0.82},
      {"f1", 0.85},
      {"auc", 0.97},
      {"note", "published random-forest baseline on the source dataset; "
               "static reference values"},
  };
  return nlohmann::json{
      {"artifact_version", kArtifactVersion},
      {"k", k},
      {"seed", seed},
      {"dataset_fingerprint", fingerprint},
      {"cells", std::move(cells)},
      {"random_forest_reference", std::move(reference)},
  };
}

nlohmann::json run_manifest_json(const std::string& command,
                                 const std::map<std::string, std::string>& config,
                                 const std::string& dataset_fingerprint,
                                 const std::vector<std::string>& outputs) {
  nlohmann::json doc;
  doc["artifact_version"] = kArtifactVersion;
  doc["command"] = command;
  doc["config"] = config;
  if (!dataset_fingerprint.empty()) doc["dataset_fingerprint"] = dataset_fingerprint;
  doc["outputs"] = outputs;
  return doc;
}

void ReportBundle::add(std::string name, std::string content) {
  files.emplace_back(std::move(name), std::move(content));
}

void write_bundle(const std::filesystem::path& out_dir, const ReportBundle& bundle) {
  std::error_code ec;
  std::filesystem::create_directories(out_dir, ec);
  if (ec) throw IoError("cannot create output directory " + out_dir.string() + ": " +
                        ec.message());
  for (const auto& [name, content] : bundle.files) {
    const auto path = out_dir / name;
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot open for writing: " + path.string());
    out << content;
    if (!out) throw IoError("write failed: " + path.string());
  }
}

}  // namespace sepred
