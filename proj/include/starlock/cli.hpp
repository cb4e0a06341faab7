#pragma once

// Command suite: keygen, simulate, tally, verify, audit, receipt-check.
// Exit codes: 0 pass, 1 internal invariant breach, 2 verification failure,
// 3 usage error (bad flags, unreadable or malformed input files).

#include <CLI11.hpp>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include "starlock/simulation.hpp"

namespace starlock::cli {

namespace fs = std::filesystem;

inline constexpr int kExitOk = 0;
inline constexpr int kExitInvariant = 1;
inline constexpr int kExitVerification = 2;
inline constexpr int kExitUsage = 3;

class UsageError : public Error {
 public:
  explicit UsageError(const std::string& what_arg) : Error("UsageError: " + what_arg) {}
};

inline std::string read_file(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  if (!in) throw UsageError("cannot read " + p.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline nlohmann::json read_json(const fs::path& p) {
  try {
    return nlohmann::json::parse(read_file(p));
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(p.string() + ": " + e.what());
  }
}

inline void write_file(const fs::path& p, const std::string& text) {
  std::ofstream out(p, std::ios::binary | std::ios::trunc);
  if (!out) throw UsageError("cannot write " + p.string());
  out << text;
}

inline void write_json(const fs::path& p, const nlohmann::json& j) { write_file(p, j.dump(2) + "\n"); }

inline void ensure_dir(const fs::path& p) {
  std::error_code ec;
  fs::create_directories(p, ec);
  if (ec) throw UsageError("cannot create " + p.string() + ": " + ec.message());
}

// Flag beats STARLOCK_GROUP, which beats the scenario's own choice; SIM otherwise.
inline const GroupParams& resolve_group(const std::string& flag, const std::string& scenario = {}) {
  std::string name = flag;
  if (name.empty())
    if (const char* env = std::getenv("STARLOCK_GROUP"); env && *env) name = env;
  if (name.empty()) name = scenario;
  if (name.empty()) name = "SIM";
  return GroupParams::named(name);
}

// --- key directory ------------------------------------------------------------

struct KeyMaterial {
  GroupParams group;
  JointPublicKey joint_key;
  std::vector<TrusteeShare> shares;
  Keypair office;
};

inline void write_keys(const fs::path& dir, const KeyMaterial& km) {
  ensure_dir(dir);
  write_json(dir / "group.json", to_json(km.group));
  write_json(dir / "joint_key.json", to_json(km.joint_key, km.group));
  for (const auto& s : km.shares) write_json(dir / ("share_" + std::to_string(s.trustee_id) + ".json"), to_json(s));
  write_json(dir / "office_key.json", {{"secret", to_hex(km.office.sk)}, {"public", to_hex(km.office.pk)}});
}

inline KeyMaterial load_keys(const fs::path& dir) {
  KeyMaterial km;
  km.group = group_from_json(read_json(dir / "group.json"));
  km.joint_key = joint_key_from_json(read_json(dir / "joint_key.json"));
  km.joint_key.validate(km.group);
  for (std::uint32_t i = 1; i <= km.joint_key.n; ++i) {
    const fs::path p = dir / ("share_" + std::to_string(i) + ".json");
    if (fs::exists(p)) km.shares.push_back(trustee_share_from_json(read_json(p)));
  }
  for (const auto& s : km.shares)
    if (!share_is_consistent(s, km.joint_key, km.group))
      throw ParseError("share " + std::to_string(s.trustee_id) + " does not match the joint key");
  const auto office = read_json(dir / "office_key.json");
  try {
    km.office = Keypair::from_secret(from_hex(office.at("secret").get<std::string>()), km.group);
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("office key: ") + e.what());
  }
  if (to_hex(km.office.pk) != office.value("public", "")) throw ParseError("office key: public part does not match");
  return km;
}

// Deterministic per seed: the same derivation simulate uses without --keys.
inline KeyMaterial generate_keys(std::uint32_t n, std::uint32_t k, const std::string& seed, const GroupParams& gp) {
  Rng rng = Rng::from_string(seed).fork("keygen");
  KeyMaterial km;
  km.group = gp;
  std::tie(km.joint_key, km.shares) = dkg(n, k, gp, rng);
  km.office = Keypair::generate(gp, rng);
  return km;
}

// --- commands ----------------------------------------------------------------

inline int cmd_keygen(std::uint32_t n, std::uint32_t k, const std::string& seed, const std::string& group,
                      const fs::path& out_dir, std::ostream& out) {
  const KeyMaterial km = generate_keys(n, k, seed, resolve_group(group));
  write_keys(out_dir, km);
  out << nlohmann::json{{"n", n}, {"k", k}, {"scheme", to_string(km.joint_key.scheme)}, {"K", to_hex(km.joint_key.K)},
                        {"shares", km.shares.size()}}.dump(2)
      << "\n";
  return kExitOk;
}

inline int cmd_simulate(const fs::path& scenario_file, const std::string& keys_dir, const std::string& group,
                        const fs::path& out_dir, std::ostream& out, std::ostream& err) {
  const Scenario sc = scenario_from_json(read_json(scenario_file));
  ElectionSetup setup;
  if (!keys_dir.empty()) {
    KeyMaterial km = load_keys(keys_dir);
    setup = scenario_setup_with_keys(sc, km.group, km.joint_key, std::move(km.shares), km.office);
  } else {
    setup = scenario_setup(sc, resolve_group(group, sc.group));
  }
  const SimulationResult res = run_simulation(sc, setup);

  ensure_dir(out_dir);
  write_file(out_dir / "board.jsonl", res.board_text);
  write_file(out_dir / "events.jsonl", res.events_jsonl);
  write_json(out_dir / "params.json", to_json(res.params));
  write_json(out_dir / "papers.json", papers_to_json(res.papers));
  write_json(out_dir / "manifest.json", res.manifest.to_json());
  write_json(out_dir / "cvr_openings.json", openings_to_json(res.openings));
  nlohmann::json receipts = nlohmann::json::array();
  for (const auto& r : res.receipts) {
    nlohmann::json j = to_json(r.receipt);
    j["voter"] = r.voter;
    j["expected"] = r.expected;
    receipts.push_back(j);
  }
  write_json(out_dir / "receipts.json", receipts);
  write_json(out_dir / "compliance.json", res.compliance.to_json());
  const nlohmann::json summary = res.summary();
  write_json(out_dir / "summary.json", summary);
  out << summary.dump(2) << "\n";
  if (res.challenge_mismatch()) {
    err << "challenged ballot decrypted to a different choice than the voter made\n";
    return kExitVerification;
  }
  return kExitOk;
}

inline ElectionParams load_params(const fs::path& p) { return election_params_from_json(read_json(p)); }

inline int cmd_verify(const fs::path& board_file, const fs::path& params_file, std::ostream& out) {
  const ElectionParams params = load_params(params_file);
  const VerificationReport rep = verify_board(read_file(board_file), params);
  out << rep.to_json().dump(2) << "\n" << rep.summary();
  return rep.ok() ? kExitOk : kExitVerification;
}

// Prints the published counts after checking the tally's proofs. With trustee
// keys the tally is also recomputed from the entries and compared.
inline int cmd_tally(const fs::path& board_file, const fs::path& params_file, const std::string& keys_dir, std::ostream& out) {
  const ElectionParams params = load_params(params_file);
  const std::string text = read_file(board_file);
  const VerificationReport rep = verify_board(text, params);
  const bool proofs_ok = rep.passed(check::kTally) && rep.passed(check::kDecryptionProofs);
  const PublishedBoard board = parse_published_board(text);
  if (!board.tally) throw UsageError("board has no tally");

  auto counts = [](const TallyRecord& t) {
    nlohmann::json j = nlohmann::json::object();
    for (const auto& ct : t.contests)
      for (const auto& col : ct.columns)
        if (col.id.front() != '(' || col.id == "(write-in)") j[ct.contest_id][col.id] = col.count;
    return j;
  };
  nlohmann::json j{{"cast_count", board.tally->cast_count}, {"counts", counts(*board.tally)}, {"proofs_valid", proofs_ok}};
  bool recount_ok = true;
  if (!keys_dir.empty()) {
    const KeyMaterial km = load_keys(keys_dir);
    std::vector<BoardEntry> entries;
    for (const auto& e : board.entries)
      entries.push_back({{e.c_v, e.p_v, e.terminal, e.z, e.timestamp}, ballot_status_from_string(e.status), e.reason});
    std::uint64_t cast = 0;
    for (const auto& e : entries) cast += e.status == BallotStatus::Cast;
    const TallyRecord recount = decrypt_tally(aggregate(entries, params), km.shares, params, cast);
    j["recount"] = counts(recount);
    recount_ok = j["recount"] == j["counts"] && cast == board.tally->cast_count;
    j["recount_matches"] = recount_ok;
  }
  out << j.dump(2) << "\n";
  return proofs_ok && recount_ok ? kExitOk : kExitVerification;
}

inline int cmd_audit(const fs::path& board_file, const fs::path& papers_file, const std::string& seed_digits,
                     double alpha, std::string params_file, std::string manifest_file, std::string openings_file,
                     std::ostream& out) {
  const DiceSeed seed = DiceSeed::parse(seed_digits);
  if (!(alpha > 0 && alpha < 1)) throw UsageError("alpha must lie in (0, 1)");
  const fs::path dir = board_file.parent_path();
  if (params_file.empty()) params_file = (dir / "params.json").string();
  if (manifest_file.empty()) manifest_file = (dir / "manifest.json").string();
  if (openings_file.empty()) openings_file = (dir / "cvr_openings.json").string();

  const ElectionParams params = load_params(params_file);
  const PublishedBoard board = parse_published_board(read_file(board_file));
  const AuditManifest manifest = AuditManifest::from_json(read_json(manifest_file));
  const auto openings = openings_from_json(read_json(openings_file));
  const auto papers = papers_from_json(read_json(papers_file));
  try {
    const AuditResult res = run_audit({board, params, manifest, openings, papers}, seed, alpha);
    out << res.to_json().dump(2) << "\n";
    return res.verdict == AuditVerdict::Confirmed ? kExitOk : kExitVerification;
  } catch (const CommitmentMismatch& e) {
    out << nlohmann::json{{"verdict", "ERROR"}, {"error", e.what()}}.dump(2) << "\n";
    return kExitVerification;
  } catch (const AuditPrecondition& e) {
    out << nlohmann::json{{"verdict", "ERROR"}, {"error", e.what()}}.dump(2) << "\n";
    return kExitVerification;
  }
}

inline int cmd_receipt_check(const fs::path& board_file, const std::string& terminal, const std::string& code,
                             std::ostream& out) {
  const PublishedBoard board = parse_published_board(read_file(board_file));
  nlohmann::json j{{"terminal", terminal}, {"code", code}};
  try {
    const ReceiptLookup r = lookup_receipt(board, terminal, code);
    j["status"] = to_string(r.status);
    if (r.index) j["index"] = *r.index;
    if (r.plaintext) j["plaintext"] = to_json(*r.plaintext);
    out << j.dump(2) << "\n";
    return r.status == ReceiptStatus::NotFound ? kExitVerification : kExitOk;
  } catch (const AmbiguousReceipt& e) {
    j["status"] = "AMBIGUOUS";
    j["error"] = e.what();
    out << j.dump(2) << "\n";
    return kExitVerification;
  }
}

// --- entry point -------------------------------------------------------------

inline int run(int argc, const char* const* argv, std::ostream& out = std::cout, std::ostream& err = std::cerr) {
  CLI::App app{"starlock: end-to-end verifiable polling-place election toolkit"};
  app.require_subcommand(1);
  std::function<int()> action;

  std::uint32_t n = 0, k = 0;
  std::string seed, group, keys, scenario, board, params, papers, manifest, openings, terminal, code;
  std::string out_dir;
  double alpha = 0.1;

  auto* keygen = app.add_subcommand("keygen", "generate trustee shares, joint key and office signing key");
  keygen->add_option("--n", n, "number of trustees")->required();
  keygen->add_option("--k", k, "decryption threshold")->required();
  keygen->add_option("--seed", seed, "deterministic seed")->required();
  keygen->add_option("--group", group, "TEST, SIM or PROD");
  keygen->add_option("--out", out_dir, "output directory")->required();
  keygen->callback([&] { action = [&] { return cmd_keygen(n, k, seed, group, out_dir, out); }; });

  auto* simulate = app.add_subcommand("simulate", "run a scripted polling-place election");
  simulate->add_option("--scenario", scenario, "scenario JSON file")->required()->check(CLI::ExistingFile);
  simulate->add_option("--keys", keys, "key directory from keygen")->check(CLI::ExistingDirectory);
  simulate->add_option("--group", group, "TEST, SIM or PROD (ignored with --keys)");
  simulate->add_option("--out", out_dir, "output directory")->required();
  simulate->callback([&] { action = [&] { return cmd_simulate(scenario, keys, group, out_dir, out, err); }; });

  auto* tally = app.add_subcommand("tally", "check and print the published tally");
  tally->add_option("board", board, "board file")->required()->check(CLI::ExistingFile);
  tally->add_option("params", params, "election parameters file")->required()->check(CLI::ExistingFile);
  tally->add_option("--keys", keys, "recount with the trustee shares in this directory")->check(CLI::ExistingDirectory);
  tally->callback([&] { action = [&] { return cmd_tally(board, params, keys, out); }; });

  auto* verify = app.add_subcommand("verify", "independently verify a published board");
  verify->add_option("board", board, "board file")->required()->check(CLI::ExistingFile);
  verify->add_option("params", params, "election parameters file")->required()->check(CLI::ExistingFile);
  verify->callback([&] { action = [&] { return cmd_verify(board, params, out); }; });

  auto* audit = app.add_subcommand("audit", "ballot-comparison risk-limiting audit");
  audit->add_option("--board", board, "board file")->required()->check(CLI::ExistingFile);
  audit->add_option("--papers", papers, "paper interpretations")->required()->check(CLI::ExistingFile);
  audit->add_option("--seed", seed, "20 decimal digits from public dice rolls")->required();
  audit->add_option("--alpha", alpha, "risk limit")->capture_default_str();
  audit->add_option("--params", params, "defaults to params.json beside the board");
  audit->add_option("--manifest", manifest, "defaults to manifest.json beside the board");
  audit->add_option("--openings", openings, "defaults to cvr_openings.json beside the board");
  audit->callback([&] { action = [&] { return cmd_audit(board, papers, seed, alpha, params, manifest, openings, out); }; });

  auto* receipt = app.add_subcommand("receipt-check", "look up a voter receipt on the board");
  receipt->add_option("board", board, "board file")->required()->check(CLI::ExistingFile);
  receipt->add_option("--terminal", terminal, "terminal id printed on the receipt")->required();
  receipt->add_option("--code", code, "20-character receipt code")->required();
  receipt->callback([&] { action = [&] { return cmd_receipt_check(board, terminal, code, out); }; });

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e, out, err);
    return rc == 0 ? kExitOk : kExitUsage;
  }
  try {
    return action();
  } catch (const InvariantViolation& e) {
    err << e.what() << "\n";
    return kExitInvariant;
  } catch (const UsageError& e) {
    err << e.what() << "\n";
    return kExitUsage;
  } catch (const ParseError& e) {
    err << e.what() << "\n";
    return kExitUsage;
  } catch (const InvalidArgument& e) {
    err << e.what() << "\n";
    return kExitUsage;
  } catch (const InvalidThreshold& e) {
    err << e.what() << "\n";
    return kExitUsage;
  } catch (const std::exception& e) {
    err << e.what() << "\n";
    return kExitInvariant;
  }
}

}  // namespace starlock::cli
