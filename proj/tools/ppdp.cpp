// ppdp — storage-provider toolkit for proofs of past data possession.
//
// Subcommands drive a state directory under an advisory lock and a logical
// day clock: evidence is ingested into per-user Bloom filters, `tick` cuts
// the daily snapshots and publishes signed commitments to the append-only
// feed, and the verification commands check evidence against what was
// published. Output is one canonical JSON record per line unless --human.
//
// Exit codes: 0 success; 1 negative verdict (verify/range, timeline with no
// match, audit hash mismatch, failed scenarios); 2 operational errors.

#include <sys/file.h>
#include <unistd.h>

#include <atomic>
#include <csignal>
#include <fstream>
#include <iostream>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "ppdp/bench.hpp"
#include "ppdp/errors.hpp"
#include "ppdp/feed.hpp"
#include "ppdp/scenario.hpp"
#include "ppdp/store.hpp"
#include "ppdp/util.hpp"
#include "ppdp/verifier.hpp"
#include "ppdp/watch.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace ppdp;

namespace {

constexpr const char* kStateMagic = "ppdp-state-v1";

std::atomic<bool> g_stop{false};

void handle_signal(int) { g_stop = true; }

bool g_human = false;

void emit(const json& record, const std::string& human) {
  if (g_human) {
    std::cout << human << "\n";
  } else {
    std::cout << record.dump() << "\n";
  }
}

// ---------------------------------------------------------------------------
// State directory: state.json carries the magic, the logical day, and the
// registration defaults. Every command except init/keygen/scenario/bench/sign
// refuses to run without it.
// ---------------------------------------------------------------------------

json load_state(const fs::path& dir) {
  auto path = dir / "state.json";
  if (!fs::exists(path)) {
    raise(Errc::state_missing, dir.string() + " is not an initialized state directory");
  }
  auto j = json::parse(read_file_text(path), nullptr, false);
  if (j.is_discarded() || !j.is_object() || j.value("magic", "") != kStateMagic) {
    raise(Errc::state_missing, dir.string() + " does not look like a ppdp state directory");
  }
  return j;
}

void save_state(const fs::path& dir, const json& state) {
  write_file_atomic(dir / "state.json", state.dump() + "\n");
}

// Advisory lock: one CLI invocation per state directory at a time.
class StateLock {
 public:
  explicit StateLock(const fs::path& dir) {
    auto path = dir / ".lock";
    fd_ = ::open(path.c_str(), O_RDWR | O_CREAT | O_CLOEXEC, 0644);
    if (fd_ < 0) raise(Errc::io_error, "cannot open lock file " + path.string());
    if (::flock(fd_, LOCK_EX | LOCK_NB) != 0) {
      ::close(fd_);
      fd_ = -1;
      raise(Errc::state_locked, "another ppdp invocation holds " + path.string());
    }
  }
  ~StateLock() {
    if (fd_ >= 0) ::close(fd_);  // closing releases the flock
  }

 private:
  int fd_ = -1;
};

RotationPolicy policy_from_cli(const std::string& mode, DayIndex period_days,
                               std::uint64_t files_per_period, DayIndex days_per_period,
                               std::uint64_t n_expected) {
  if (mode == "capacity") return capacity_policy();
  if (mode != "periodic") raise(Errc::invalid_parameter, "policy must be capacity or periodic");
  if (period_days > 0) return periodic_policy(period_days);
  if (files_per_period > 0) {
    return periodic_policy(periodic_days_from_rate(n_expected, files_per_period, days_per_period));
  }
  raise(Errc::invalid_parameter,
        "periodic policy needs --period-days or --files-per-period");
}

json policy_json(const RotationPolicy& policy) {
  json j{{"mode", policy.mode == RotationMode::capacity ? "capacity" : "periodic"}};
  if (policy.mode == RotationMode::periodic) j["period_days"] = policy.period_days;
  return j;
}

std::optional<Signature> load_sig_arg(const std::string& sig_path) {
  if (sig_path.empty()) return std::nullopt;
  auto hex = read_file_text(sig_path);
  while (!hex.empty() && (hex.back() == '\n' || hex.back() == '\r' || hex.back() == ' ')) {
    hex.pop_back();
  }
  auto bytes = from_hex(hex);
  if (bytes.size() != 64) raise(Errc::malformed_key, sig_path + ": expected 64-byte signature");
  Signature sig;
  std::copy(bytes.begin(), bytes.end(), sig.bytes.begin());
  return sig;
}

std::ifstream open_evidence(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) raise(Errc::io_error, "cannot open evidence file " + path);
  return in;
}

SigningKeyPair load_csp_key(const fs::path& dir) {
  auto path = dir / "keys" / "csp.key";
  if (!fs::exists(path)) {
    raise(Errc::key_unavailable, "no CSP key at " + path.string() + "; run `ppdp keygen` first");
  }
  return load_keypair(path);
}

PublicKey load_feed_pub(const fs::path& dir) {
  auto pub_path = dir / "feed.pub";
  if (fs::exists(pub_path)) return load_public_key(pub_path);
  auto key_pub = dir / "keys" / "csp.pub";
  if (fs::exists(key_pub)) return load_public_key(key_pub);
  raise(Errc::key_unavailable, "no published CSP public key under " + dir.string());
}

json probes_json(const std::vector<EpochProbe>& trace) {
  json out = json::array();
  for (const auto& p : trace) {
    out.push_back({{"epoch", p.epoch_seq}, {"days", p.probed_days}});
  }
  return out;
}

int run(int argc, char** argv) {
  CLI::App app{"Proofs of past data possession for storage providers"};
  app.require_subcommand(1);

  std::string state_dir = "state";
  app.add_option("--state-dir", state_dir, "State directory")
      ->envname("PPDP_STATE_DIR")
      ->capture_default_str();
  app.add_flag("--human", g_human, "Human-readable output instead of JSON records");

  // --- init ---
  auto* cmd_init = app.add_subcommand("init", "Create a fresh state directory");
  std::uint64_t init_n = 1000;
  double init_p = 0.01;
  std::string init_policy = "capacity";
  DayIndex init_period = 0;
  std::uint64_t init_rate = 0;
  DayIndex init_days_per_period = 30;
  std::string init_variant = "plain";
  cmd_init->add_option("--n", init_n, "Default expected elements per filter");
  cmd_init->add_option("--p", init_p, "Default target false-positive probability");
  cmd_init->add_option("--policy", init_policy, "Default rotation policy (capacity|periodic)");
  cmd_init->add_option("--period-days", init_period, "Periodic rotation length in days");
  cmd_init->add_option("--files-per-period", init_rate, "Expected files per period (derives period)");
  cmd_init->add_option("--days-per-period", init_days_per_period, "Days per rate period");
  cmd_init->add_option("--variant", init_variant, "Default digest variant (plain|signed)");

  // --- keygen ---
  auto* cmd_keygen = app.add_subcommand("keygen", "Generate a signing key pair");
  std::string keygen_role = "csp";
  std::string keygen_out;
  bool keygen_force = false;
  cmd_keygen->add_option("--role", keygen_role, "csp or user")->capture_default_str();
  cmd_keygen->add_option("--out", keygen_out, "Output path prefix (<prefix>.key/.pub)");
  cmd_keygen->add_flag("--force", keygen_force, "Overwrite existing key files");

  // --- register ---
  auto* cmd_register = app.add_subcommand("register", "Register a user");
  std::string reg_user;
  std::uint64_t reg_n = 0;
  double reg_p = 0.0;
  std::string reg_policy;
  DayIndex reg_period = 0;
  std::uint64_t reg_rate = 0;
  DayIndex reg_days_per_period = 0;
  std::string reg_variant;
  std::string reg_user_pub;
  cmd_register->add_option("--user", reg_user, "User id (email-style)")->required();
  cmd_register->add_option("--n", reg_n, "Expected elements (default from init)");
  cmd_register->add_option("--p", reg_p, "Target false-positive probability");
  cmd_register->add_option("--policy", reg_policy, "capacity|periodic");
  cmd_register->add_option("--period-days", reg_period, "Periodic rotation length in days");
  cmd_register->add_option("--files-per-period", reg_rate, "Expected files per period");
  cmd_register->add_option("--days-per-period", reg_days_per_period, "Days per rate period");
  cmd_register->add_option("--variant", reg_variant, "plain|signed");
  cmd_register->add_option("--user-pub", reg_user_pub, "User public key file (signed variant)");

  // --- ingest ---
  auto* cmd_ingest = app.add_subcommand("ingest", "Ingest an evidence file for a user");
  std::string ing_user, ing_file, ing_sig;
  cmd_ingest->add_option("--user", ing_user)->required();
  cmd_ingest->add_option("--file", ing_file, "Evidence file")->required();
  cmd_ingest->add_option("--sig", ing_sig, "Hex signature file (signed variant)");

  // --- tick ---
  auto* cmd_tick = app.add_subcommand(
      "tick", "End the current day: snapshot all filters, publish proofs, advance the clock");

  // --- verify ---
  auto* cmd_verify = app.add_subcommand("verify", "Check evidence against a published day");
  std::string ver_user, ver_file, ver_sig;
  std::int64_t ver_day = -1;
  cmd_verify->add_option("--user", ver_user)->required();
  cmd_verify->add_option("--file", ver_file, "Evidence file")->required();
  cmd_verify->add_option("--day", ver_day, "Day to check (default: latest published)");
  cmd_verify->add_option("--sig", ver_sig, "Hex signature file (signed variant)");

  // --- timeline ---
  auto* cmd_timeline =
      app.add_subcommand("timeline", "Find the earliest day the evidence was present");
  std::string tl_user, tl_file, tl_sig;
  cmd_timeline->add_option("--user", tl_user)->required();
  cmd_timeline->add_option("--file", tl_file, "Evidence file")->required();
  cmd_timeline->add_option("--sig", tl_sig, "Hex signature file (signed variant)");

  // --- range ---
  auto* cmd_range = app.add_subcommand("range", "Check presence within a day range");
  std::string rg_user, rg_file, rg_sig;
  DayIndex rg_from = 0, rg_to = 0;
  cmd_range->add_option("--user", rg_user)->required();
  cmd_range->add_option("--file", rg_file, "Evidence file")->required();
  cmd_range->add_option("--from", rg_from, "First day")->required();
  cmd_range->add_option("--to", rg_to, "Last day")->required();
  cmd_range->add_option("--sig", rg_sig, "Hex signature file (signed variant)");

  // --- audit ---
  auto* cmd_audit =
      app.add_subcommand("audit", "Reveal a snapshot and check it against the published hash");
  std::string au_user, au_out;
  DayIndex au_day = 0;
  cmd_audit->add_option("--user", au_user)->required();
  cmd_audit->add_option("--day", au_day)->required();
  cmd_audit->add_option("--out", au_out, "Write the revealed snapshot bytes here");

  // --- scenario ---
  auto* cmd_scenario = app.add_subcommand("scenario", "Run adversarial scenarios");
  std::string sc_name;
  bool sc_all = false;
  std::uint64_t sc_seed = 42;
  cmd_scenario->add_option("name", sc_name, "Scenario name");
  cmd_scenario->add_flag("--all", sc_all, "Run every scenario");
  cmd_scenario->add_option("--seed", sc_seed, "Deterministic seed")->capture_default_str();
  bool sc_list = false;
  cmd_scenario->add_flag("--list", sc_list, "List scenario names");

  // --- bench ---
  auto* cmd_bench = app.add_subcommand("bench", "Evaluation harness");
  cmd_bench->require_subcommand(1);
  BenchConfig bench_cfg;
  std::string bench_out;
  std::string bench_variant = "plain";
  auto add_bench_common = [&](CLI::App* sub) {
    sub->add_option("--files", bench_cfg.file_count, "Corpus size")->capture_default_str();
    sub->add_option("--seed", bench_cfg.seed, "Deterministic seed")->capture_default_str();
    sub->add_option("--reps", bench_cfg.repetitions, "Repetitions")->capture_default_str();
    sub->add_option("--variant", bench_variant, "plain|signed")->capture_default_str();
    sub->add_option("--min-size", bench_cfg.min_size, "Smallest file size (bytes)");
    sub->add_option("--max-size", bench_cfg.max_size, "Largest file size (bytes)");
    sub->add_option("--out", bench_out, "Also write a gnuplot-compatible column file");
  };
  auto* bench_ingest_cmd = cmd_bench->add_subcommand("ingest", "Proof-insertion overhead");
  add_bench_common(bench_ingest_cmd);
  auto* bench_match_cmd = cmd_bench->add_subcommand("match", "Matching time");
  add_bench_common(bench_match_cmd);
  std::string bench_mode = "tp";
  bench_match_cmd->add_option("--mode", bench_mode, "tp (true positive) | tn (true negative)")
      ->capture_default_str();
  auto* bench_storage_cmd = cmd_bench->add_subcommand("storage", "Storage arithmetic");
  std::uint64_t bench_users = 1;
  std::uint64_t bench_n = 1000;
  double bench_p = 0.01;
  double bench_deleted = 5'000'000.0;
  bench_storage_cmd->add_option("--users", bench_users)->capture_default_str();
  bench_storage_cmd->add_option("--n", bench_n)->capture_default_str();
  bench_storage_cmd->add_option("--p", bench_p)->capture_default_str();
  bench_storage_cmd->add_option("--deleted-bytes", bench_deleted,
                                "Assumed deleted bytes per user per day");

  // --- sign ---
  auto* cmd_sign = app.add_subcommand("sign", "Sign evidence with a user key (signed variant)");
  std::string sign_key, sign_file, sign_out;
  cmd_sign->add_option("--key", sign_key, "User secret key file")->required();
  cmd_sign->add_option("--file", sign_file, "Evidence file")->required();
  cmd_sign->add_option("--out", sign_out, "Write hex signature here");

  // --- watch ---
  auto* cmd_watch = app.add_subcommand("watch", "Poll per-user drop directories and ingest");
  std::string watch_root;
  unsigned watch_interval_ms = 1000;
  bool watch_once_flag = false;
  cmd_watch->add_option("--root", watch_root, "Drop directory root")->required();
  cmd_watch->add_option("--interval-ms", watch_interval_ms, "Poll interval")
      ->capture_default_str();
  cmd_watch->add_flag("--once", watch_once_flag, "Run a single poll and exit");

  CLI11_PARSE(app, argc, argv);

  fs::path dir(state_dir);

  if (cmd_init->parsed()) {
    if (fs::exists(dir / "state.json")) {
      raise(Errc::state_exists, dir.string() + " is already initialized");
    }
    fs::create_directories(dir / "users");
    fs::create_directories(dir / "keys");
    StateLock lock(dir);
    auto params = params_for(init_n, init_p);
    auto policy =
        policy_from_cli(init_policy, init_period, init_rate, init_days_per_period, init_n);
    variant_from_name(init_variant);  // validate
    json state{{"magic", kStateMagic},
               {"day", 0},
               {"defaults",
                {{"n_expected", init_n},
                 {"p_target", init_p},
                 {"policy", policy_json(policy)},
                 {"variant", init_variant}}}};
    save_state(dir, state);
    emit({{"initialized", true}, {"state_dir", dir.string()}, {"day", 0}},
         "initialized " + dir.string() + " (day 0)");
    return 0;
  }

  if (cmd_keygen->parsed()) {
    if (keygen_role != "csp" && keygen_role != "user") {
      raise(Errc::invalid_parameter, "--role must be csp or user");
    }
    fs::path prefix;
    if (!keygen_out.empty()) {
      prefix = keygen_out;
    } else if (keygen_role == "csp") {
      load_state(dir);
      fs::create_directories(dir / "keys");
      prefix = dir / "keys" / "csp";
    } else {
      raise(Errc::invalid_parameter, "user keygen needs --out <prefix>");
    }
    auto kp = keygen(keygen_role == "csp" ? KeyRole::csp : KeyRole::user, prefix, keygen_force);
    emit({{"role", keygen_role},
          {"public_key", to_hex(kp.public_key())},
          {"key_path", prefix.string() + ".key"},
          {"pub_path", prefix.string() + ".pub"}},
         keygen_role + " key pair written to " + prefix.string() + ".{key,pub}");
    return 0;
  }

  if (cmd_scenario->parsed()) {
    if (sc_list) {
      for (const auto& name : scenario_names()) {
        emit({{"scenario", name}}, name);
      }
      return 0;
    }
    if (!sc_all && sc_name.empty()) {
      raise(Errc::invalid_parameter, "give a scenario name or --all");
    }
    auto outcomes =
        sc_all ? run_all_scenarios(sc_seed) : std::vector{run_scenario(sc_name, sc_seed)};
    std::size_t failures = 0;
    for (const auto& outcome : outcomes) {
      json assertions = json::array();
      for (const auto& a : outcome.assertions) {
        assertions.push_back({{"property", a.property},
                              {"description", a.description},
                              {"passed", a.passed},
                              {"limitation", a.limitation}});
        if (!a.passed) ++failures;
      }
      std::string human = (outcome.ok() ? "PASS " : "FAIL ") + outcome.name;
      for (const auto& a : outcome.assertions) {
        human += "\n  [" + std::string(a.passed ? "ok" : "FAIL") + "] (" + a.property + ") " +
                 a.description + (a.limitation ? " [documented limitation]" : "");
      }
      emit({{"scenario", outcome.name}, {"ok", outcome.ok()}, {"assertions", assertions}}, human);
    }
    return failures == 0 ? 0 : 1;
  }

  if (cmd_bench->parsed()) {
    bench_cfg.variant = variant_from_name(bench_variant);
    if (bench_ingest_cmd->parsed()) {
      auto report = bench_ingest(bench_cfg);
      emit({{"bench", "ingest"},
            {"seed", report.seed},
            {"variant", report.variant},
            {"machine", report.machine},
            {"note", "baseline is a local file copy; overhead percentages are "
                     "not comparable to network-upload deployments"}},
           "ingest bench, variant " + report.variant + " on " + report.machine);
      std::string columns = "# size_bytes baseline_s with_proof_s overhead_pct\n";
      for (const auto& b : report.buckets) {
        emit({{"size_lo", b.size_lo},
              {"size_hi", b.size_hi},
              {"files", b.files},
              {"mean_size_bytes", b.mean_size_bytes},
              {"baseline_s", b.baseline_seconds},
              {"with_proof_s", b.with_proof_seconds},
              {"overhead_pct", b.overhead_pct}},
             "  " + std::to_string(b.size_lo) + ".." + std::to_string(b.size_hi) + " bytes: " +
                 std::to_string(b.overhead_pct) + "% overhead over " + std::to_string(b.files) +
                 " files");
        columns += std::to_string(static_cast<std::uint64_t>(b.mean_size_bytes)) + " " +
                   std::to_string(b.baseline_seconds) + " " +
                   std::to_string(b.with_proof_seconds) + " " + std::to_string(b.overhead_pct) +
                   "\n";
      }
      if (!bench_out.empty()) write_file_atomic(fs::path(bench_out), std::string_view(columns));
      return 0;
    }
    if (bench_match_cmd->parsed()) {
      if (bench_mode != "tp" && bench_mode != "tn") {
        raise(Errc::invalid_parameter, "--mode must be tp or tn");
      }
      auto mode = bench_mode == "tp" ? MatchMode::true_positive : MatchMode::true_negative;
      auto report = bench_match(bench_cfg, mode);
      emit({{"bench", "match"},
            {"mode", report.mode},
            {"seed", report.seed},
            {"variant", report.variant},
            {"machine", report.machine},
            {"spearman_size_time", report.spearman_size_time}},
           "match bench (" + report.mode +
               "), spearman(size,time) = " + std::to_string(report.spearman_size_time));
      std::string columns = "# size_bytes seconds\n";
      for (const auto& s : report.samples) {
        if (!g_human) {
          emit({{"size_bytes", s.size_bytes}, {"seconds", s.seconds}, {"positive", s.positive}},
               "");
        }
        columns += std::to_string(s.size_bytes) + " " + std::to_string(s.seconds) + "\n";
      }
      if (!bench_out.empty()) write_file_atomic(fs::path(bench_out), std::string_view(columns));
      return 0;
    }
    // storage
    auto report = storage_report(bench_users, params_for(bench_n, bench_p), bench_deleted);
    emit({{"bench", "storage"},
          {"users", report.users},
          {"m_bits", report.m_bits},
          {"filter_bytes_per_user_day", report.filter_bytes_per_user_day},
          {"snapshot_file_bytes", report.snapshot_file_bytes},
          {"total_filter_bytes_per_day", report.total_filter_bytes_per_day},
          {"assumed_deleted_bytes", report.assumed_deleted_bytes},
          {"savings_bytes_per_user_day", report.savings_bytes_per_user_day}},
         std::to_string(report.users) + " user(s): " +
             std::to_string(report.filter_bytes_per_user_day) +
             " filter bytes/user/day; saves " +
             std::to_string(report.savings_bytes_per_user_day) +
             " bytes/user/day against deletions");
    return 0;
  }

  if (cmd_sign->parsed()) {
    auto key = load_keypair(sign_key);
    auto in = open_evidence(sign_file);
    auto sig = user_sign(in, key);
    auto hex = to_hex(sig.bytes);
    if (!sign_out.empty()) write_file_atomic(fs::path(sign_out), hex + "\n");
    emit({{"file", sign_file}, {"signature", hex}, {"public_key", to_hex(key.public_key())}},
         "signature " + hex);
    return 0;
  }

  // Everything below operates on an initialized state directory.
  auto state = load_state(dir);
  StateLock lock(dir);
  DayIndex today = state.at("day").get<DayIndex>();
  FilterStore store(dir);
  auto feed_path = dir / "feed.jsonl";

  if (cmd_register->parsed()) {
    const auto& defaults = state.at("defaults");
    auto n = reg_n > 0 ? reg_n : defaults.at("n_expected").get<std::uint64_t>();
    auto p = reg_p > 0 ? reg_p : defaults.at("p_target").get<double>();
    RotationPolicy policy;
    if (!reg_policy.empty() || reg_period > 0 || reg_rate > 0) {
      auto mode = !reg_policy.empty()
                      ? reg_policy
                      : std::string(reg_period > 0 || reg_rate > 0 ? "periodic" : "capacity");
      auto dpp = reg_days_per_period > 0 ? reg_days_per_period : 30;
      policy = policy_from_cli(mode, reg_period, reg_rate, dpp, n);
    } else {
      const auto& pj = defaults.at("policy");
      policy = pj.at("mode") == "capacity"
                   ? capacity_policy()
                   : periodic_policy(pj.at("period_days").get<DayIndex>());
    }
    auto variant = variant_from_name(!reg_variant.empty()
                                         ? reg_variant
                                         : defaults.at("variant").get<std::string>());
    std::optional<PublicKey> user_pub;
    if (!reg_user_pub.empty()) user_pub = load_public_key(reg_user_pub);
    auto params = params_for(n, p);
    store.register_user(UserId(reg_user), params, policy, variant, user_pub);
    emit({{"registered", reg_user},
          {"m_bits", params.m_bits},
          {"k_hashes", params.k_hashes},
          {"n_expected", params.n_expected},
          {"policy", policy_json(policy)},
          {"variant", std::string(variant_name(variant))}},
         "registered " + reg_user);
    return 0;
  }

  if (cmd_ingest->parsed()) {
    auto sig = load_sig_arg(ing_sig);
    auto in = open_evidence(ing_file);
    auto receipt = store.ingest(UserId(ing_user), in, today, sig);
    emit({{"user", ing_user},
          {"day", today},
          {"epoch", receipt.epoch_seq},
          {"digest", to_hex(receipt.digest.bytes)},
          {"variant", std::string(variant_name(receipt.digest.variant))}},
         "ingested " + ing_file + " for " + ing_user + " (day " + std::to_string(today) +
             ", epoch " + std::to_string(receipt.epoch_seq) + ")");
    return 0;
  }

  if (cmd_tick->parsed()) {
    auto snapshots = store.snapshot_all(today);
    auto published = publish_day(store, feed_path, today, load_csp_key(dir));
    state["day"] = today + 1;
    save_state(dir, state);
    emit({{"day", today},
          {"snapshots", snapshots.size()},
          {"published", published},
          {"next_day", today + 1}},
         "day " + std::to_string(today) + " closed: " + std::to_string(snapshots.size()) +
             " snapshot(s), " + std::to_string(published) + " record(s) published");
    return 0;
  }

  auto feed = ProofFeed::load(feed_path);
  Verifier verifier(store, feed, load_feed_pub(dir));

  if (cmd_verify->parsed()) {
    UserId user(ver_user);
    DayIndex day;
    if (ver_day >= 0) {
      day = static_cast<DayIndex>(ver_day);
    } else {
      auto latest = verifier.latest_published_day(user);
      if (!latest) {
        raise(Errc::missing_record, "no published proofs for '" + ver_user + "' yet");
      }
      day = *latest;
    }
    auto sig = load_sig_arg(ver_sig);
    auto in = open_evidence(ver_file);
    auto result = verifier.check_membership(in, user, day, sig);
    emit({{"verdict", std::string(verdict_name(result.verdict))},
          {"user", result.user},
          {"day", result.day},
          {"epoch", result.epoch_seq},
          {"feed_signature_valid", result.feed_signature_valid},
          {"filter_hash", to_hex(result.record.filter_hash)}},
         std::string(verdict_name(result.verdict)) + " for " + ver_file + " (user " + ver_user +
             ", day " + std::to_string(day) + ")");
    return result.verdict == Verdict::positive ? 0 : 1;
  }

  if (cmd_timeline->parsed()) {
    auto sig = load_sig_arg(tl_sig);
    auto in = open_evidence(tl_file);
    auto result = verifier.find_generation_time(in, UserId(tl_user), sig);
    json j{{"user", tl_user}, {"probes", probes_json(result.trace)}};
    std::string human;
    if (result.earliest_day) {
      j["earliest_day"] = *result.earliest_day;
      j["epoch"] = *result.epoch_seq;
      human = "earliest presence: day " + std::to_string(*result.earliest_day) + " (epoch " +
              std::to_string(*result.epoch_seq) + ")";
    } else {
      j["earliest_day"] = nullptr;
      human = "no presence found in any published proof";
    }
    emit(j, human);
    return result.earliest_day ? 0 : 1;
  }

  if (cmd_range->parsed()) {
    auto sig = load_sig_arg(rg_sig);
    auto in = open_evidence(rg_file);
    auto result = verifier.present_in_range(in, UserId(rg_user), rg_from, rg_to, sig);
    json j{{"user", rg_user},
           {"from", rg_from},
           {"to", rg_to},
           {"present", result.present},
           {"probes", probes_json(result.trace)}};
    if (result.witness_day) {
      j["witness_day"] = *result.witness_day;
    } else {
      j["witness_day"] = nullptr;
    }
    emit(j, result.present
                ? "present (witness day " + std::to_string(*result.witness_day) + ")"
                : "not present in days [" + std::to_string(rg_from) + ", " +
                      std::to_string(rg_to) + "]");
    return result.present ? 0 : 1;
  }

  if (cmd_audit->parsed()) {
    auto result = audit_reveal(store, feed, UserId(au_user), au_day);
    if (!au_out.empty()) {
      write_file_atomic(fs::path(au_out), std::span<const std::uint8_t>(result.snapshot));
    }
    json j{{"user", au_user},
           {"day", au_day},
           {"epoch", result.record.epoch_seq},
           {"hash_matches", result.hash_matches},
           {"published_filter_hash", to_hex(result.record.filter_hash)},
           {"snapshot_bytes", result.snapshot.size()}};
    if (!au_out.empty()) j["snapshot_out"] = au_out;
    emit(j, std::string("audit: revealed snapshot ") +
                (result.hash_matches ? "matches" : "DOES NOT match") + " the published hash");
    return result.hash_matches ? 0 : 1;
  }

  if (cmd_watch->parsed()) {
    WatchConfig config{fs::path(watch_root), std::chrono::milliseconds(watch_interval_ms)};
    Watcher watcher(store, config);
    auto report = [&](const WatchResult& result) {
      for (const auto& d : result.diagnostics) std::cerr << "ppdp: watch: " << d << "\n";
      for (const auto& r : result.receipts) {
        emit({{"user", r.user},
              {"path", r.path.string()},
              {"epoch", r.receipt.epoch_seq},
              {"digest", to_hex(r.receipt.digest.bytes)}},
             "ingested " + r.path.string() + " for " + r.user);
      }
    };
    if (watch_once_flag) {
      report(watcher.watch_once(today));
      return 0;
    }
    std::signal(SIGINT, handle_signal);
    std::signal(SIGTERM, handle_signal);
    watcher.watch_loop(
        g_stop, [&] { return load_state(dir).at("day").get<DayIndex>(); }, report);
    return 0;
  }

  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  try {
    return run(argc, argv);
  } catch (const Error& e) {
    std::cerr << "ppdp: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "ppdp: " << e.what() << "\n";
    return 2;
  }
}
