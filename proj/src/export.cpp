#include "fracwave/export.hpp"

#include <cmath>
#include <cstdio>
#include <cstring>
#include <filesystem>
#include <fstream>

#include <fftw3.h>
#include <json.hpp>

#ifndef FRACWAVE_VERSION
#define FRACWAVE_VERSION "unknown"
#endif

namespace fracwave {

using nlohmann::ordered_json;

namespace {

constexpr char kMagic[8] = {'F', 'W', 'T', 'R', 'A', 'J', '1', '\0'};

ordered_json num(double x) {
  if (std::isfinite(x)) return x;
  return nullptr;
}

ordered_json member_json(const SweepMember& m) {
  return ordered_json{{"value", m.value},
                      {"steps", m.steps},
                      {"h", m.h},
                      {"epsilon", m.epsilon},
                      {"nu", m.nu},
                      {"s", m.s},
                      {"violation_l2", num(m.violation_l2)},
                      {"violation_linf", num(m.violation_linf)},
                      {"penalty_mass", m.penalty_mass},
                      {"bv_variation", m.bv_variation},
                      {"apriori_bound", m.apriori.bound},
                      {"energy_residual", m.energy_residual},
                      {"vw_min", m.vw_min},
                      {"vw_max", m.vw_max},
                      {"vw_inviscid_min", m.vw_inviscid_min},
                      {"vw_tolerance", num(m.vw_tolerance)},
                      {"vw_pass", m.vw_pass},
                      {"viscous_pairing", m.viscous_pairing},
                      {"identity_max_abs", m.identity_max_abs},
                      {"vi_residual", num(m.vi_residual)},
                      {"vi_self", num(m.vi_self)},
                      {"reference_QT", num(m.reference_QT)},
                      {"reference_T", num(m.reference_T)},
                      {"newton_iters", m.newton_iters},
                      {"krylov_iters", m.krylov_iters}};
}

ordered_json number_array(const std::vector<double>& v) {
  ordered_json a = ordered_json::array();
  for (double x : v) a.push_back(num(x));
  return a;
}

}  // namespace

std::string library_version() { return FRACWAVE_VERSION; }

std::string format_number(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

std::string energy_csv(const EnergyReport& e) {
  std::string out = std::string(kEnergyHeader) + "\n";
  for (const auto& r : e.rows) {
    out += format_number(r.t) + "," + format_number(r.kinetic) + "," + format_number(r.elastic) +
           "," + format_number(r.penalty) + "," + format_number(r.dissipation) + "," +
           format_number(r.work) + "," + format_number(r.residual) + "\n";
  }
  return out;
}

std::string trajectory_csv(const Trajectory& traj, int decimate) {
  if (decimate < 1) throw ExportError("decimation factor must be at least 1");
  const std::size_t m = traj.interior_size();
  std::string out = "t";
  for (std::size_t k = 0; k < m; k += std::size_t(decimate)) out += ",u" + std::to_string(k);
  out += "\n";
  for (int j = 0; j <= traj.steps(); ++j) {
    out += format_number(traj.time(j));
    const auto u = traj.u_interior(j);
    for (std::size_t k = 0; k < m; k += std::size_t(decimate)) out += "," + format_number(u[k]);
    out += "\n";
  }
  return out;
}

std::string sweep_csv(const SweepReport& r) {
  std::string out =
      "value,steps,h,epsilon,nu,s,violation_l2,violation_linf,penalty_mass,bv_variation,"
      "apriori_bound,energy_residual,vw_min,vw_max,vw_inviscid_min,viscous_pairing,"
      "identity_max_abs,reference_QT,cauchy_QT,cauchy_T\n";
  for (std::size_t k = 0; k < r.members.size(); ++k) {
    const SweepMember& m = r.members[k];
    const double cq = k > 0 && k - 1 < r.cauchy_QT.size() ? r.cauchy_QT[k - 1] : kNotApplicable;
    const double ct = k > 0 && k - 1 < r.cauchy_T.size() ? r.cauchy_T[k - 1] : kNotApplicable;
    const double cols[] = {m.value,          m.h,           m.epsilon,        m.nu,
                           m.s,              m.violation_l2, m.violation_linf, m.penalty_mass,
                           m.bv_variation,   m.apriori.bound, m.energy_residual, m.vw_min,
                           m.vw_max,         m.vw_inviscid_min, m.viscous_pairing,
                           m.identity_max_abs, m.reference_QT, cq, ct};
    out += format_number(cols[0]) + "," + std::to_string(m.steps);
    for (std::size_t c = 1; c < std::size(cols); ++c) out += "," + format_number(cols[c]);
    out += "\n";
  }
  return out;
}

std::string sweep_json(const SweepReport& r) {
  ordered_json members = ordered_json::array();
  for (const auto& m : r.members) members.push_back(member_json(m));
  ordered_json j{{"axis", to_string(r.axis)},
                 {"pass", r.pass},
                 {"members", members},
                 {"cauchy_QT", number_array(r.cauchy_QT)},
                 {"cauchy_T", number_array(r.cauchy_T)},
                 {"rates", number_array(r.rates)},
                 {"cauchy_decreasing", r.cauchy_decreasing},
                 {"violation_decreasing", r.violation_decreasing},
                 {"reference_decreasing", r.reference_decreasing},
                 {"envelope_C", num(r.envelope_C)},
                 {"envelope_ok", r.envelope_ok},
                 {"sigma", num(r.sigma)},
                 {"apriori_spread", r.apriori.spread},
                 {"apriori_flagged", r.apriori.flagged},
                 {"notes", r.notes}};
  if (r.reference) j["reference"] = member_json(*r.reference);
  return j.dump(2) + "\n";
}

std::string metadata_json(const ArtifactMeta& m) {
  ordered_json j{{"kind", m.kind},
                 {"config_hash", m.config_hash},
                 {"seed", m.seed},
                 {"versions", {{"fracwave", library_version()}, {"fftw", std::string(fftw_version)}}},
                 {"files", m.files}};
  return j.dump(2) + "\n";
}

void write_file(const std::string& dir, const std::string& name, const std::string& content) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw ExportError("cannot create directory " + dir + ": " + ec.message());
  const std::string path = (std::filesystem::path(dir) / name).string();
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw ExportError("cannot open " + path + " for writing");
  out.write(content.data(), std::streamsize(content.size()));
  if (!out) throw ExportError("write failed for " + path);
}

void write_trajectory_binary(const Trajectory& traj, const std::string& config_hash,
                             const std::string& path) {
  std::string buf(kMagic, sizeof kMagic);
  char hash[16] = {};
  std::memcpy(hash, config_hash.data(), std::min<std::size_t>(16, config_hash.size()));
  buf.append(hash, 16);
  const std::uint64_t n = std::uint64_t(traj.steps()), m = traj.interior_size();
  buf.append(reinterpret_cast<const char*>(&n), sizeof n);
  buf.append(reinterpret_cast<const char*>(&m), sizeof m);
  for (auto get : {&Trajectory::u_interior, &Trajectory::v_interior, &Trajectory::force_interior})
    for (int j = 0; j <= traj.steps(); ++j) {
      const auto s = (traj.*get)(j);
      buf.append(reinterpret_cast<const char*>(s.data()), s.size() * sizeof(double));
    }
  const auto p = std::filesystem::path(path);
  write_file(p.has_parent_path() ? p.parent_path().string() : ".", p.filename().string(), buf);
}

Trajectory read_trajectory_binary(const ProblemSpec& spec, const std::string& expected_hash,
                                  const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ExportError("cannot open " + path);
  char magic[8], hash[16];
  std::uint64_t n = 0, m = 0;
  in.read(magic, 8);
  in.read(hash, 16);
  in.read(reinterpret_cast<char*>(&n), sizeof n);
  in.read(reinterpret_cast<char*>(&m), sizeof m);
  if (!in || std::memcmp(magic, kMagic, 8) != 0) throw ExportError(path + ": not a trajectory file");
  if (std::string(hash, 16) != expected_hash.substr(0, 16))
    throw ExportError(path + ": config hash does not match");
  auto p = std::make_shared<const ProblemSpec>(spec);
  Trajectory traj(p);
  if (n != std::uint64_t(traj.steps()) || m != traj.interior_size())
    throw ExportError(path + ": dimensions do not match the configuration");
  std::vector<double> block(std::size_t(n + 1) * m * 3);
  in.read(reinterpret_cast<char*>(block.data()), std::streamsize(block.size() * sizeof(double)));
  if (!in) throw ExportError(path + ": truncated trajectory data");
  const std::size_t stride = std::size_t(n + 1) * m;
  for (int j = 0; j <= int(n); ++j) {
    const std::size_t off = std::size_t(j) * m;
    const Field u = traj.expand({block.data() + off, m});
    const Field v = traj.expand({block.data() + stride + off, m});
    const Field f = traj.expand({block.data() + 2 * stride + off, m});
    traj.store(j, u.values, v.values, f.values);
  }
  return traj;
}

std::vector<std::string> export_run(const Trajectory& traj, const RunConfig& cfg,
                                    const std::string& dir) {
  const std::string hash = config_hash(cfg);
  std::vector<std::string> files;
  auto has = [&](const char* f) {
    for (const auto& x : cfg.output.formats)
      if (x == f) return true;
    return false;
  };
  write_file(dir, "config.json", serialize_config(cfg));
  files.push_back("config.json");
  const EnergyReport energy = energy_ledger(traj);
  if (has("csv")) {
    write_file(dir, "energy.csv", energy_csv(energy));
    write_file(dir, "trajectory.csv", trajectory_csv(traj, cfg.output.decimate));
    files.push_back("energy.csv");
    files.push_back("trajectory.csv");
  }
  if (has("binary")) {
    write_trajectory_binary(traj, hash, (std::filesystem::path(dir) / "trajectory.bin").string());
    files.push_back("trajectory.bin");
  }
  if (has("json")) {
    ordered_json summary{{"config_hash", hash},
                         {"steps", traj.steps()},
                         {"h", traj.h()},
                         {"final_energy_residual", energy.final_residual()},
                         {"max_abs_energy_residual", energy.max_abs_residual()},
                         {"penalty_mass", penalty_mass(traj)}};
    if (traj.spec().graph.is_indicator()) {
      const auto cv = constraint_violation(traj);
      summary["violation_l2"] = cv.l2_QT;
      summary["violation_linf"] = cv.linf;
    }
    write_file(dir, "summary.json", summary.dump(2) + "\n");
    files.push_back("summary.json");
  }
  write_file(dir, "metadata.json", metadata_json({"run", hash, cfg.seed, files}));
  files.push_back("metadata.json");
  return files;
}

std::vector<std::string> export_sweep(const SweepReport& r, const RunConfig& cfg,
                                      const std::string& dir) {
  const std::string hash = config_hash(cfg);
  std::vector<std::string> files;
  write_file(dir, "config.json", serialize_config(cfg));
  files.push_back("config.json");
  write_file(dir, "sweep.csv", sweep_csv(r));
  files.push_back("sweep.csv");
  write_file(dir, "sweep.json", sweep_json(r));
  files.push_back("sweep.json");
  write_file(dir, "metadata.json", metadata_json({"sweep", hash, cfg.seed, files}));
  files.push_back("metadata.json");
  return files;
}

}  // namespace fracwave
