#pragma once

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <ostream>
#include <string>
#include <vector>

#include <json.hpp>

#include "contracheck/metrics.hpp"

namespace contracheck {

namespace detail {

// NaN round-trips as JSON null.
inline nlohmann::json num(double v) {
  if (std::isnan(v)) return nullptr;
  return v;
}

inline double num_from(const nlohmann::json& j) {
  if (j.is_null()) return kNaN;
  return j.get<double>();
}

inline std::string fixed(double v, int places = 4) {
  if (std::isnan(v)) return "nan";
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.*f", places, v);
  return buf;
}

}  // namespace detail

inline nlohmann::json report_to_json(const EvaluationReport& r) {
  return {
      {"meta", {{"approach", r.approach}, {"model", r.model}}},
      {"counts",
       {{"n", r.n},
        {"positives", r.positives},
        {"true_positive_set", r.true_positives},
        {"tp", r.tp},
        {"fp", r.fp},
        {"tn", r.tn},
        {"fn", r.fn}}},
      {"classification",
       {{"accuracy", detail::num(r.accuracy)},
        {"precision", detail::num(r.precision)},
        {"recall_tpr", detail::num(r.recall_tpr)},
        {"f1", detail::num(r.f1)},
        {"fpr", detail::num(r.fpr)},
        {"tnr", detail::num(r.tnr)},
        {"fnr", detail::num(r.fnr)}}},
      {"evidence",
       {{"ehr", detail::num(r.ehr)},
        {"ehrc", detail::num(r.ehrc)},
        {"epr", detail::num(r.epr)},
        {"eprc", detail::num(r.eprc)},
        {"err", detail::num(r.err)},
        {"errc", detail::num(r.errc)},
        {"aecr", detail::num(r.aecr)}}},
      {"averages",
       {{"sentences_pos", detail::num(r.avg_sentences_pos)},
        {"sentences_neg", detail::num(r.avg_sentences_neg)},
        {"sentences_all", detail::num(r.avg_sentences_all)},
        {"retries_pos", detail::num(r.avg_retries_pos)},
        {"retries_neg", detail::num(r.avg_retries_neg)},
        {"retries_all", detail::num(r.avg_retries_all)}}},
      {"identity_residuals",
       {{"ehr", detail::num(r.residual_ehr)},
        {"epr", detail::num(r.residual_epr)},
        {"err", detail::num(r.residual_err)}}}};
}

inline EvaluationReport report_from_json(const nlohmann::json& j) {
  EvaluationReport r;
  try {
    r.approach = j.at("meta").at("approach").get<std::string>();
    r.model = j.at("meta").at("model").get<std::string>();
    const auto& c = j.at("counts");
    r.n = c.at("n").get<std::size_t>();
    r.positives = c.at("positives").get<std::size_t>();
    r.true_positives = c.at("true_positive_set").get<std::size_t>();
    r.tp = c.at("tp").get<std::size_t>();
    r.fp = c.at("fp").get<std::size_t>();
    r.tn = c.at("tn").get<std::size_t>();
    r.fn = c.at("fn").get<std::size_t>();
    const auto& k = j.at("classification");
    r.accuracy = detail::num_from(k.at("accuracy"));
    r.precision = detail::num_from(k.at("precision"));
    r.recall_tpr = detail::num_from(k.at("recall_tpr"));
    r.f1 = detail::num_from(k.at("f1"));
    r.fpr = detail::num_from(k.at("fpr"));
    r.tnr = detail::num_from(k.at("tnr"));
    r.fnr = detail::num_from(k.at("fnr"));
    const auto& e = j.at("evidence");
    r.ehr = detail::num_from(e.at("ehr"));
    r.ehrc = detail::num_from(e.at("ehrc"));
    r.epr = detail::num_from(e.at("epr"));
    r.eprc = detail::num_from(e.at("eprc"));
    r.err = detail::num_from(e.at("err"));
    r.errc = detail::num_from(e.at("errc"));
    r.aecr = detail::num_from(e.at("aecr"));
    const auto& a = j.at("averages");
    r.avg_sentences_pos = detail::num_from(a.at("sentences_pos"));
    r.avg_sentences_neg = detail::num_from(a.at("sentences_neg"));
    r.avg_sentences_all = detail::num_from(a.at("sentences_all"));
    r.avg_retries_pos = detail::num_from(a.at("retries_pos"));
    r.avg_retries_neg = detail::num_from(a.at("retries_neg"));
    r.avg_retries_all = detail::num_from(a.at("retries_all"));
    const auto& idr = j.at("identity_residuals");
    r.residual_ehr = detail::num_from(idr.at("ehr"));
    r.residual_epr = detail::num_from(idr.at("epr"));
    r.residual_err = detail::num_from(idr.at("err"));
  } catch (const nlohmann::json::exception& ex) {
    throw SchemaError(std::string("report: ") + ex.what());
  }
  return r;
}

inline void write_report_json(const std::filesystem::path& path, const EvaluationReport& r) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << report_to_json(r).dump(2) << '\n';
}

inline EvaluationReport read_report_json(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot read " + path.string());
  nlohmann::json j = nlohmann::json::parse(in, nullptr, false);
  if (j.is_discarded()) throw SchemaError("report: invalid JSON in " + path.string());
  return report_from_json(j);
}

/// Side-by-side plain-text table; one column per report.
inline void write_report_table(std::ostream& os, const std::vector<EvaluationReport>& reports,
                               const std::vector<std::string>& labels) {
  using Row = std::pair<const char*, double (*)(const EvaluationReport&)>;
  static const std::vector<Row> kRows = {
      {"accuracy", [](const EvaluationReport& r) { return r.accuracy; }},
      {"precision", [](const EvaluationReport& r) { return r.precision; }},
      {"F1 score", [](const EvaluationReport& r) { return r.f1; }},
      {"TPR/recall", [](const EvaluationReport& r) { return r.recall_tpr; }},
      {"FPR", [](const EvaluationReport& r) { return r.fpr; }},
      {"TNR", [](const EvaluationReport& r) { return r.tnr; }},
      {"FNR", [](const EvaluationReport& r) { return r.fnr; }},
      {"EHR", [](const EvaluationReport& r) { return r.ehr; }},
      {"EHRC", [](const EvaluationReport& r) { return r.ehrc; }},
      {"EPR", [](const EvaluationReport& r) { return r.epr; }},
      {"EPRC", [](const EvaluationReport& r) { return r.eprc; }},
      {"ERR", [](const EvaluationReport& r) { return r.err; }},
      {"ERRC", [](const EvaluationReport& r) { return r.errc; }},
      {"AECR", [](const EvaluationReport& r) { return r.aecr; }},
      {"avg #sen, pos", [](const EvaluationReport& r) { return r.avg_sentences_pos; }},
      {"avg #sen, neg", [](const EvaluationReport& r) { return r.avg_sentences_neg; }},
      {"avg #sen, all", [](const EvaluationReport& r) { return r.avg_sentences_all; }},
      {"avg #retries, pos", [](const EvaluationReport& r) { return r.avg_retries_pos; }},
      {"avg #retries, neg", [](const EvaluationReport& r) { return r.avg_retries_neg; }},
      {"avg #retries, all", [](const EvaluationReport& r) { return r.avg_retries_all; }},
  };

  constexpr int kNameWidth = 20;
  constexpr int kColWidth = 12;
  char buf[128];
  std::snprintf(buf, sizeof(buf), "%-*s", kNameWidth, "metric");
  os << buf;
  for (const auto& label : labels) {
    std::snprintf(buf, sizeof(buf), " %*s", kColWidth, label.c_str());
    os << buf;
  }
  os << '\n';
  for (const auto& [name, get] : kRows) {
    std::snprintf(buf, sizeof(buf), "%-*s", kNameWidth, name);
    os << buf;
    for (const auto& r : reports) {
      std::snprintf(buf, sizeof(buf), " %*s", kColWidth, detail::fixed(get(r)).c_str());
      os << buf;
    }
    os << '\n';
  }
  std::snprintf(buf, sizeof(buf), "%-*s", kNameWidth, "counts (n/+/TP/FP/TN/FN)");
  os << buf;
  for (const auto& r : reports) {
    const std::string c = std::to_string(r.n) + "/" + std::to_string(r.positives) + "/" +
                          std::to_string(r.tp) + "/" + std::to_string(r.fp) + "/" +
                          std::to_string(r.tn) + "/" + std::to_string(r.fn);
    std::snprintf(buf, sizeof(buf), " %*s", kColWidth, c.c_str());
    os << buf;
  }
  os << '\n';
}

/// Plot-ready CSVs: hit/precision scatter pairs plus radar-chart axes.
inline void write_plot_data(const std::filesystem::path& dir,
                            const std::vector<EvaluationReport>& reports) {
  std::filesystem::create_directories(dir);
  const auto csv = [](double v) { return detail::fixed(v, 6); };

  std::ofstream sc(dir / "scatter_rates.csv", std::ios::trunc);
  sc << "approach,model,ehr,epr\n";
  std::ofstream scc(dir / "scatter_rates_correct.csv", std::ios::trunc);
  scc << "approach,model,ehrc,eprc\n";
  std::ofstream radar(dir / "radar.csv", std::ios::trunc);
  radar << "approach,model,metric,value\n";
  for (const auto& r : reports) {
    sc << r.approach << ',' << r.model << ',' << csv(r.ehr) << ',' << csv(r.epr) << '\n';
    scc << r.approach << ',' << r.model << ',' << csv(r.ehrc) << ',' << csv(r.eprc) << '\n';
    const std::pair<const char*, double> axes[] = {
        {"accuracy", r.accuracy}, {"tpr", r.recall_tpr}, {"ehr", r.ehr},   {"ehrc", r.ehrc},
        {"epr", r.epr},           {"eprc", r.eprc},      {"aecr", r.aecr}};
    for (const auto& [name, value] : axes) {
      radar << r.approach << ',' << r.model << ',' << name << ',' << csv(value) << '\n';
    }
  }
}

/// Flip and retention rates of a filter stage as an aligned table.
inline void write_filter_error_report(std::ostream& os, const FilterErrorReport& f,
                                      const std::string& label) {
  os << "filter error analysis (" << label << ")\n";
  os << "  R(wrong->correct | flip)      " << detail::fixed(f.rate_wrong_to_correct_given_flip)
     << "  (" << f.wrong_to_correct << "/" << f.flip_count << ")\n";
  os << "  R(correct->wrong | flip)      " << detail::fixed(f.rate_correct_to_wrong_given_flip)
     << "  (" << f.correct_to_wrong << "/" << f.flip_count << ")\n";
  os << "  R(evidence kept | found)      " << detail::fixed(f.rate_evidence_kept_given_found)
     << "  (" << f.kept_count << "/" << f.found_count << ")\n";
  os << "  R(evidence discarded | found) " << detail::fixed(f.rate_evidence_discarded_given_found)
     << "  (" << (f.found_count - f.kept_count) << "/" << f.found_count << ")\n";
}

}  // namespace contracheck
