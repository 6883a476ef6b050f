// Command-line front end: decide, witness, verify, batch.
//
// Exit codes: 0 = hyperrigid / certificate emitted / certificate valid,
// 1 = not hyperrigid / refused / certificate rejected, 2 = error,
// 3 = symbolic verdict only (Fock computation needs an infinite fiber).

#include "hyperrigid/hyperrigid.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <atomic>
#include <filesystem>
#include <iostream>
#include <thread>
#include <vector>

namespace fs = std::filesystem;
using namespace hyperrigid;

namespace {

enum Exit { kYes = 0, kNo = 1, kError = 2, kSymbolic = 3 };

struct Options {
  std::size_t fock_level = 3;
  std::size_t basis_budget = 10000;
  std::string format = "json";
  unsigned jobs = 1;
};

std::string yes_no(std::optional<bool> b) { return b ? (*b ? "true" : "false") : "n/a"; }

std::string verdict_text(const Verdict& v) {
  std::string s = std::string("hyperrigid: ") + (v.hyperrigid ? "yes" : "no") + "\n";
  s += "certificate: " + v.certificate_kind + "\n";
  s += "routes: nondegeneracy=" + yes_no(v.routes.nondegeneracy) + " range_condition=" +
       yes_no(v.routes.range_condition()) + " reg_preimage=" + yes_no(v.routes.reg_preimage) +
       " row_finite=" + yes_no(v.routes.row_finite) + "\n";
  if (v.witness)
    s += "witness: edge " + v.witness->edge + " at " + v.witness->vertex + ", norm2 " + to_string(v.witness->norm2) +
         ", pairing " + to_string(v.witness->pairing_max) + "\n";
  return s + v.statement + "\n";
}

int cmd_decide(const std::string& path, const Options& opt) {
  try {
    Verdict v = decide_hyperrigid(io::read_instance(path));
    std::cout << (opt.format == "text" ? verdict_text(v) : io::verdict_json(v).dump(2) + "\n");
    return v.hyperrigid ? kYes : kNo;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kError;
  }
}

int cmd_witness(const std::string& path, const Options& opt) {
  try {
    GraphPresentation g = io::read_instance(path);
    Verdict v = decide_hyperrigid(g);
    if (v.hyperrigid) {
      std::cerr << "refused: the instance is hyperrigid (" << v.certificate_kind
                << "); there is no negative certificate to emit\n";
      return kNo;
    }
    WitnessCertificate cert = io::witness_for(g, opt.fock_level, opt.basis_budget);
    if (opt.format == "text") {
      std::cout << verdict_text(v) << "sigma:";
      for (const auto& s : cert.sigma) std::cout << " " << s;
      std::cout << "\nM0 dim: " << cert.m0.size() << "\n";
      for (const auto& [name, r] : cert.residuals) std::cout << "residual " << name << ": " << to_string(r) << "\n";
      std::cout << "non-reducing: t(" << cert.non_reducing.edge << ") h" << cert.non_reducing.vacuum
                << ", |P_M t h|^2 = " << to_string(cert.non_reducing.projection_norm2) << "\n";
    } else {
      io::ordered_json j;
      j["verdict"] = io::verdict_json(v);
      j["certificate"] = io::certificate_json(cert);
      std::cout << j.dump(2) << "\n";
    }
    return kYes;
  } catch (const SymbolicOnly& e) {
    std::cerr << "symbolic verdict only: " << e.what() << "\n";
    return kSymbolic;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kError;
  }
}

int cmd_verify(const std::string& witness_path, const std::string& instance_path, const Options& opt) {
  WitnessCertificate claimed;
  GraphPresentation g;
  try {
    io::json doc = io::json::parse(io::read_file(witness_path));
    claimed = io::certificate_from(doc.contains("certificate") ? doc["certificate"] : doc);
    g = io::read_instance(instance_path);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kError;
  }
  auto reject = [](const std::string& why) {
    std::cout << "false\nfirst failing check: " << why << "\n";
    return kNo;
  };
  WitnessCertificate rebuilt;
  try {
    rebuilt = io::witness_for(g, claimed.depth, opt.basis_budget);
  } catch (const DomainError& e) {
    return reject(std::string("instance: ") + e.what());
  } catch (const SymbolicOnly& e) {
    return reject(std::string("instance: ") + e.what());
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kError;
  }
  if (auto bad = io::first_mismatch(claimed, rebuilt)) return reject(*bad);
  std::cout << "true\n";
  return kYes;
}

struct BatchRow {
  std::string file;
  std::optional<Verdict> verdict;
  std::string error;
};

int cmd_batch(const std::string& dir, const Options& opt) {
  std::vector<fs::path> files;
  try {
    for (const auto& entry : fs::directory_iterator(dir))
      if (entry.is_regular_file() && entry.path().extension() == ".json") files.push_back(entry.path());
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kError;
  }
  std::sort(files.begin(), files.end());
  std::vector<BatchRow> rows(files.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < files.size(); i = next++) {
      rows[i].file = files[i].filename().string();
      try {
        rows[i].verdict = decide_hyperrigid(io::read_instance(files[i].string()));
      } catch (const std::exception& e) {
        rows[i].error = e.what();
      }
    }
  };
  std::vector<std::thread> pool;
  for (unsigned k = 0; k < std::max(1u, opt.jobs); ++k) pool.emplace_back(worker);
  for (auto& t : pool) t.join();

  std::size_t yes = 0, no = 0, errors = 0;
  for (const auto& r : rows) (r.verdict ? (r.verdict->hyperrigid ? yes : no) : errors)++;
  if (opt.format == "text") {
    for (const auto& r : rows)
      std::cout << r.file << "\t"
                << (r.verdict ? (r.verdict->hyperrigid ? "hyperrigid" : "not-hyperrigid") : "error: " + r.error) << "\n";
    std::cout << "hyperrigid " << yes << ", not hyperrigid " << no << ", errors " << errors << "\n";
  } else {
    io::ordered_json out;
    out["files"] = io::ordered_json::array();
    for (const auto& r : rows) {
      io::ordered_json j;
      j["file"] = r.file;
      if (r.verdict) j["verdict"] = io::verdict_json(*r.verdict);
      else j["error"] = r.error;
      out["files"].push_back(j);
    }
    out["summary"] = {{"hyperrigid", yes}, {"not_hyperrigid", no}, {"errors", errors}};
    std::cout << out.dump(2) << "\n";
  }
  return kYes;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Hyperrigidity decisions and witnesses for tensor algebras of graph correspondences"};
  app.require_subcommand(1);
  Options opt;
  auto common = [&](CLI::App* sub) {
    sub->add_option("--fock-level", opt.fock_level, "Fock truncation level N")->check(CLI::Range(1, 64));
    sub->add_option("--basis-budget", opt.basis_budget, "maximum number of Fock basis vectors");
    sub->add_option("--format", opt.format, "output format")->check(CLI::IsMember({"json", "text"}));
  };

  std::string path, witness_path;
  auto* decide = app.add_subcommand("decide", "decide hyperrigidity of an instance");
  decide->add_option("instance", path, "instance file")->required();
  common(decide);
  auto* witness = app.add_subcommand("witness", "emit a non-hyperrigidity certificate");
  witness->add_option("instance", path, "instance file")->required();
  common(witness);
  auto* verify = app.add_subcommand("verify", "re-check a certificate against its instance");
  verify->add_option("certificate", witness_path, "certificate file")->required();
  verify->add_option("instance", path, "instance file")->required();
  common(verify);
  auto* batch = app.add_subcommand("batch", "decide every .json instance in a directory");
  batch->add_option("dir", path, "instance directory")->required();
  batch->add_option("--jobs", opt.jobs, "worker threads")->check(CLI::Range(1u, 256u));
  common(batch);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int rc = app.exit(e);
    return rc == 0 ? 0 : kError;
  }
  if (*decide) return cmd_decide(path, opt);
  if (*witness) return cmd_witness(path, opt);
  if (*verify) return cmd_verify(witness_path, path, opt);
  return cmd_batch(path, opt);
}
