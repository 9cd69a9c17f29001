#include "byzsim/metrics.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>

namespace byzsim {

namespace {

constexpr const char* kHeader =
    "seed,k,f_gap,grad_sq,c_k,good_sampled,byz_sampled,clip_activations,coords_sent,epochs";

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

}  // namespace

void emit_csv(const MetricsTable& table, std::ostream& out) {
  if (table.seeds.size() != table.trajectories.size())
    throw std::invalid_argument("emit_csv: seeds and trajectories must align");
  out << kHeader << '\n';
  for (std::size_t s = 0; s < table.seeds.size(); ++s) {
    for (const auto& row : table.trajectories[s]) {
      out << table.seeds[s] << ',' << row.k << ',' << format_double(row.f_gap) << ','
          << format_double(row.grad_sq) << ',' << row.c_k << ',' << row.good_sampled << ','
          << row.byz_sampled << ',' << row.clip_activations << ',' << row.coords_sent << ','
          << format_double(row.epochs) << '\n';
    }
  }
}

void emit_csv_file(const MetricsTable& table, const std::string& path) {
  std::ofstream out(path, std::ios::binary);  // LF endings everywhere
  if (!out) throw std::runtime_error("emit_csv: cannot open '" + path + "'");
  emit_csv(table, out);
  if (!out) throw std::runtime_error("emit_csv: write failed for '" + path + "'");
}

MetricsTable parse_metrics_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) throw std::runtime_error("parse_metrics_csv: empty input");
  if (line != kHeader) throw std::runtime_error("parse_metrics_csv: unexpected header");

  MetricsTable table;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::istringstream ls(line);
    std::string field;
    auto next = [&]() {
      if (!std::getline(ls, field, ',')) throw std::runtime_error("parse_metrics_csv: short row");
      return field;
    };
    const auto seed = static_cast<std::uint64_t>(std::stoull(next()));
    RoundMetrics row;
    row.k = static_cast<Index>(std::stoll(next()));
    row.f_gap = std::stod(next());
    row.grad_sq = std::stod(next());
    row.c_k = std::stoi(next());
    row.good_sampled = static_cast<Index>(std::stoll(next()));
    row.byz_sampled = static_cast<Index>(std::stoll(next()));
    row.clip_activations = static_cast<Index>(std::stoll(next()));
    row.coords_sent = static_cast<Index>(std::stoll(next()));
    row.epochs = std::stod(next());
    if (table.seeds.empty() || table.seeds.back() != seed) {
      table.seeds.push_back(seed);
      table.trajectories.emplace_back();
    }
    table.trajectories.back().push_back(row);
  }
  return table;
}

}  // namespace byzsim
