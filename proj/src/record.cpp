#include "vinlab/record.hpp"

#include <chrono>
#include <fstream>
#include <sstream>

#include "vinlab/core.hpp"

namespace vinlab {

nlohmann::ordered_json ExperimentRecord::to_json() const {
  nlohmann::ordered_json j;
  j["schema"] = "vinlab.record.v1";
  j["timestamp"] = timestamp;
  j["version"] = version;
  j["subcommand"] = subcommand;
  j["params"] = params;
  j["results"] = results;
  if (!convergence.is_null()) j["convergence"] = convergence;
  j["runtime_seconds"] = runtime_seconds;
  return j;
}

ExperimentRecord ExperimentRecord::from_json(const nlohmann::ordered_json& j) {
  if (j.value("schema", "") != "vinlab.record.v1")
    throw ValidationError("record: unknown schema");
  ExperimentRecord r;
  r.timestamp = j.value("timestamp", "");
  r.version = j.value("version", "");
  r.subcommand = j.value("subcommand", "");
  r.params = j.value("params", nlohmann::ordered_json::object());
  r.results = j.value("results", nlohmann::ordered_json::object());
  if (j.contains("convergence")) r.convergence = j["convergence"];
  r.runtime_seconds = j.value("runtime_seconds", 0.0);
  return r;
}

std::string now_iso8601_utc() {
  const auto now = std::chrono::system_clock::now();
  const std::time_t t = std::chrono::system_clock::to_time_t(now);
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

void atomic_write_text(const std::filesystem::path& path, const std::string& text) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  const auto tmp = path.string() + ".tmp";
  {
    std::ofstream os(tmp, std::ios::binary | std::ios::trunc);
    if (!os) throw ValidationError("cannot open " + tmp);
    os << text;
    if (!os) throw ValidationError("write failed: " + tmp);
  }
  std::filesystem::rename(tmp, path);
}

void write_record(const std::filesystem::path& path, const ExperimentRecord& rec) {
  atomic_write_text(path, rec.to_json().dump(2) + "\n");
}

ExperimentRecord read_record(const std::filesystem::path& path) {
  std::ifstream is(path);
  if (!is) throw ValidationError("cannot open " + path.string());
  nlohmann::ordered_json j;
  is >> j;
  return ExperimentRecord::from_json(j);
}

void append_record_jsonl(const std::filesystem::path& path, const ExperimentRecord& rec) {
  std::string existing;
  if (std::filesystem::exists(path)) {
    std::ifstream is(path, std::ios::binary);
    std::ostringstream ss;
    ss << is.rdbuf();
    existing = ss.str();
  }
  atomic_write_text(path, existing + rec.to_json().dump() + "\n");
}

std::vector<ExperimentRecord> read_records_jsonl(const std::filesystem::path& path) {
  std::ifstream is(path);
  if (!is) throw ValidationError("cannot open " + path.string());
  std::vector<ExperimentRecord> out;
  std::string line;
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    out.push_back(ExperimentRecord::from_json(nlohmann::ordered_json::parse(line)));
  }
  return out;
}

namespace {

std::string csv_cell(const nlohmann::ordered_json& v) {
  if (v.is_string()) {
    std::string s = v.get<std::string>();
    if (s.find_first_of(",\"\n") != std::string::npos) {
      std::string q = "\"";
      for (char c : s) q += (c == '"') ? std::string("\"\"") : std::string(1, c);
      q += "\"";
      return q;
    }
    return s;
  }
  return v.dump();
}

}  // namespace

PlotData emit_plotdata(const std::vector<ExperimentRecord>& records, const std::string& kind) {
  if (records.empty()) throw EmptySelection("emit_plotdata: no records selected");
  for (const auto& r : records)
    if (r.subcommand != records.front().subcommand)
      throw ValidationError("emit_plotdata: records must share a subcommand");

  PlotData out;
  std::ostringstream csv;
  nlohmann::ordered_json desc;
  desc["kind"] = kind;

  if (kind == "growth") {
    csv << "n,s,N,J,log_N,log_J\n";
    int n = 0, s = 0;
    for (const auto& r : records) {
      n = r.params.value("n", 0);
      s = r.params.value("s", 0);
      const auto& Ns = r.results.at("N_values");
      const auto& Js = r.results.at("counts");
      for (size_t i = 0; i < Ns.size(); ++i) {
        const double N = Ns[i].get<double>();
        const double J = std::stod(Js[i].get<std::string>());
        csv << n << "," << s << "," << N << "," << Js[i].get<std::string>() << ","
            << std::log(N) << "," << std::log(J) << "\n";
      }
    }
    desc["x"] = {{"column", "log_N"}, {"label", "log N"}};
    desc["y"] = {{"column", "log_J"}, {"label", "log J"}};
    desc["reference_slopes"] = {double(s), 2.0 * s - 0.5 * n * (n + 1)};
  } else if (kind == "vp-scan") {
    csv << "n,p,inv_delta,log_inv_delta,max_ratio,log_max_ratio,converged\n";
    for (const auto& r : records) {
      for (const auto& pt : r.results.at("points")) {
        const double invd = pt.at("inv_delta").get<double>();
        const double mr = pt.at("max_ratio").get<double>();
        csv << r.params.value("n", 0) << "," << r.params.value("p", 0.0) << "," << invd << ","
            << std::log(invd) << "," << mr << "," << std::log(mr) << ","
            << pt.at("converged").get<bool>() << "\n";
      }
    }
    desc["x"] = {{"column", "log_inv_delta"}, {"label", "log 1/delta"}};
    desc["y"] = {{"column", "log_max_ratio"}, {"label", "log max ratio"}};
  } else if (kind == "threshold") {
    csv << "n,delta,omega1_minus_1\n";
    for (const auto& r : records) {
      csv << r.params.value("n", 0) << "," << r.params.value("delta", std::string()) << ","
          << r.results.at("margin_decimal").get<double>() << "\n";
    }
    desc["x"] = {{"column", "delta"}, {"label", "Delta"}};
    desc["y"] = {{"column", "omega1_minus_1"}, {"label", "omega_1 - 1"}};
    desc["zero_crossing"] = "Delta = n + 1";
  } else if (kind == "minor-sup") {
    csv << "n,N,log_N,sup_estimate,log_sup,samples,seed\n";
    for (const auto& r : records) {
      const auto& Ns = r.results.at("N_values");
      const auto& sups = r.results.at("sup_estimates");
      for (size_t i = 0; i < Ns.size(); ++i) {
        const double N = Ns[i].get<double>();
        const double sup = sups[i].get<double>();
        csv << r.params.value("n", 0) << "," << N << "," << std::log(N) << "," << sup << ","
            << std::log(sup) << "," << r.params.value("samples", 0L) << ","
            << r.params.value("seed", 0ULL) << "\n";
      }
    }
    desc["x"] = {{"column", "log_N"}, {"label", "log N"}};
    desc["y"] = {{"column", "log_sup"}, {"label", "log sup |F|"}};
    desc["reference_slopes"] = {1.0};
  } else {
    throw ValidationError("emit_plotdata: unknown plot kind " + kind);
  }
  // default log-log axes; the description is renderer-agnostic
  desc["scales"] = {{"x", "linear"}, {"y", "linear"}};
  out.csv = csv.str();
  out.description = desc;
  return out;
}

}  // namespace vinlab
