#include "rcrc/cli.hpp"

#include <algorithm>
#include <chrono>
#include <cstdlib>
#include <ctime>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <memory>
#include <set>
#include <sstream>

#include <omp.h>

#include "CLI11.hpp"
#include "json.hpp"
#include "rcrc/corpus.hpp"
#include "rcrc/error.hpp"
#include "rcrc/example_io.hpp"
#include "rcrc/finetune.hpp"
#include "rcrc/masking.hpp"
#include "rcrc/metrics.hpp"
#include "rcrc/pretune.hpp"
#include "rcrc/random.hpp"
#include "rcrc/stats.hpp"
#include "rcrc/version.hpp"

namespace rcrc::cli {

namespace {

namespace fs = std::filesystem;
using json = nlohmann::json;

constexpr std::size_t kBatch = 4096;

class Logger {
public:
    Logger(std::ostream& err, bool quiet) : err_(err), quiet_(quiet) {}

    void info(const std::string& msg) const { write("info", msg); }
    void warn(const std::string& msg) const { write("warn", msg); }

private:
    void write(const char* level, const std::string& msg) const {
        if (quiet_ && std::string_view(level) == "info") return;
        const auto now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
        std::tm tm{};
        gmtime_r(&now, &tm);
        err_ << std::put_time(&tm, "%Y-%m-%dT%H:%M:%SZ") << " [" << level << "] " << msg << '\n';
    }

    std::ostream& err_;
    bool quiet_;
};

struct Common {
    int jobs = 0;
    bool quiet = false;
    std::string manifest;
};

std::string hex64(std::uint64_t x) {
    std::ostringstream os;
    os << std::hex << std::setw(16) << std::setfill('0') << x;
    return os.str();
}

ordered_json describe_input(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw DataError("cannot read " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    const std::string bytes = buf.str();
    ordered_json rec;
    rec["path"] = path;
    rec["bytes"] = bytes.size();
    rec["fnv1a64"] = hex64(fnv1a64(bytes));
    return rec;
}

void write_manifest(const std::string& path, const std::string& subcommand,
                    const std::vector<std::string>& inputs, const ordered_json& config,
                    const ordered_json& counts) {
    ordered_json m;
    m["tool"] = kToolName;
    m["version"] = kToolVersion;
    m["subcommand"] = subcommand;
    m["inputs"] = ordered_json::array();
    for (const auto& p : inputs) m["inputs"].push_back(describe_input(p));
    m["config"] = config;
    m["counts"] = counts;
    std::ofstream out(path, std::ios::binary);
    if (!out) throw DataError("cannot write manifest " + path);
    out << m.dump(2) << '\n';
}

std::string manifest_path(const Common& common, const std::string& out) {
    if (!common.manifest.empty()) return common.manifest;
    return out.empty() ? std::string() : out + ".manifest.json";
}

std::ofstream open_out(const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw DataError("cannot write " + path);
    return out;
}

ordered_json issues_json(const std::vector<LoadIssue>& issues) {
    ordered_json arr = ordered_json::array();
    for (const auto& i : issues) {
        ordered_json e;
        e["line"] = i.line;
        e["id"] = i.record_id;
        e["message"] = i.message;
        arr.push_back(e);
    }
    return arr;
}

void log_issues(const Logger& log, const std::string& path, const std::vector<LoadIssue>& issues) {
    if (issues.empty()) return;
    log.warn(path + ": " + std::to_string(issues.size()) + " record(s) rejected");
    for (std::size_t i = 0; i < std::min<std::size_t>(issues.size(), 5); ++i) {
        const auto& is = issues[i];
        log.warn("  line " + std::to_string(is.line) + (is.record_id.empty() ? "" : " (" + is.record_id + ")") +
                 ": " + is.message);
    }
}

Tokenizer make_tokenizer(const std::string& vocab_path) {
    if (vocab_path.empty()) return Tokenizer{};
    return Tokenizer(load_vocab(vocab_path));
}

std::uint64_t resolve_seed(const CLI::Option* opt, std::uint64_t flag_value) {
    if (opt->count() > 0) return flag_value;
    if (const char* env = std::getenv("RCRC_FORGE_SEED"); env && *env) {
        try {
            std::size_t used = 0;
            const std::uint64_t v = std::stoull(env, &used);
            if (used == std::string_view(env).size()) return v;
        } catch (const std::exception&) {
        }
        throw UsageError(std::string("RCRC_FORGE_SEED is not an unsigned integer: ") + env);
    }
    return flag_value;
}

// ---------------------------------------------------------------- ingest

struct IngestArgs {
    std::string qa, reviews, dialogues, out, report;
};

int run_ingest(const IngestArgs& a, const Common& common, std::ostream& out, const Logger& log) {
    if (a.qa.empty() && a.reviews.empty() && a.dialogues.empty()) {
        throw UsageError("ingest needs at least one of --qa, --reviews, --dialogues");
    }
    if (!a.out.empty()) fs::create_directories(a.out);

    ordered_json report;
    ordered_json counts;
    std::vector<std::string> inputs;
    if (!a.qa.empty()) {
        inputs.push_back(a.qa);
        auto loaded = load_qa_pairs(a.qa);
        log_issues(log, a.qa, loaded.issues);
        report["qa"] = {{"path", a.qa},
                        {"loaded", loaded.value.size()},
                        {"entities", loaded.value.entity_ids().size()},
                        {"rejected", loaded.issues.size()},
                        {"issues", issues_json(loaded.issues)}};
        counts["qa_pairs"] = loaded.value.size();
        if (!a.out.empty()) {
            auto f = open_out((fs::path(a.out) / "qa.jsonl").string());
            write_qa_pairs(f, loaded.value);
        }
        log.info("qa pairs loaded after validation: " + std::to_string(loaded.value.size()));
    }
    if (!a.reviews.empty()) {
        inputs.push_back(a.reviews);
        auto loaded = load_reviews(a.reviews);
        log_issues(log, a.reviews, loaded.issues);
        std::size_t sentences = 0;
        for (const auto& r : loaded.value.records()) sentences += r.sentences.size();
        report["reviews"] = {{"path", a.reviews},
                             {"loaded", loaded.value.size()},
                             {"entities", loaded.value.entity_ids().size()},
                             {"sentences", sentences},
                             {"rejected", loaded.issues.size()},
                             {"issues", issues_json(loaded.issues)}};
        counts["reviews"] = loaded.value.size();
        if (!a.out.empty()) {
            auto f = open_out((fs::path(a.out) / "reviews.jsonl").string());
            write_reviews(f, loaded.value);
        }
        log.info("reviews loaded after validation: " + std::to_string(loaded.value.size()));
    }
    if (!a.dialogues.empty()) {
        inputs.push_back(a.dialogues);
        auto loaded = load_rcrc_dialogues(a.dialogues);
        log_issues(log, a.dialogues, loaded.issues);
        const auto& set = loaded.value;
        report["dialogues"] = {{"path", a.dialogues},
                               {"loaded", set.dialogues.size()},
                               {"spans_matched_raw", set.spans_matched_raw},
                               {"spans_matched_normalized", set.spans_matched_normalized},
                               {"rejected_entries", loaded.issues.size()},
                               {"issues", issues_json(loaded.issues)}};
        counts["dialogues"] = set.dialogues.size();
        if (!a.out.empty()) {
            auto f = open_out((fs::path(a.out) / "dialogues.json").string());
            write_dialogues(f, set.dialogues);
        }
        log.info("dialogues loaded after validation: " + std::to_string(set.dialogues.size()));
    }
    report["counts_note"] = "loaded after validation";

    if (a.report.empty()) {
        out << report.dump(2) << '\n';
    } else {
        auto f = open_out(a.report);
        f << report.dump(2) << '\n';
    }
    std::string mpath = common.manifest;
    if (mpath.empty() && !a.out.empty()) mpath = (fs::path(a.out) / "manifest.json").string();
    if (!mpath.empty()) write_manifest(mpath, "ingest", inputs, ordered_json::object(), counts);
    return ok;
}

// -------------------------------------------------------------- generate

struct GenerateArgs {
    std::string qa, reviews, out, vocab;
    GenConfig cfg;
    CLI::Option* seed_opt = nullptr;
};

ordered_json gen_config_json(const GenConfig& cfg, const std::string& vocab) {
    ordered_json c;
    c["h_max"] = cfg.h_max;
    c["k_repeats"] = cfg.k_repeats;
    c["neg_prob"] = cfg.neg_prob;
    c["max_len"] = cfg.max_len;
    c["max_left"] = cfg.max_left;
    c["seed"] = cfg.seed;
    c["tokenizer"] = vocab.empty() ? "basic" : "wordpiece";
    if (!vocab.empty()) c["vocab"] = vocab;
    return c;
}

ordered_json report_json(const GenReport& r) {
    ordered_json c;
    c["attempts"] = r.attempts;
    c["emitted"] = r.emitted;
    c["skipped"] = r.skipped;
    c["skipped_answer_too_long"] = r.skipped_answer_too_long;
    c["skipped_no_reviews"] = r.skipped_no_reviews;
    c["positives"] = r.positives;
    c["negatives"] = r.negatives;
    c["negative_fallbacks"] = r.negative_fallbacks;
    c["answer_leaks"] = r.answer_leaks;
    c["context_truncated"] = r.context_truncated;
    c["h_histogram"] = r.h_histogram;
    return c;
}

int run_generate(GenerateArgs a, const Common& common, const Logger& log) {
    a.cfg.seed = resolve_seed(a.seed_opt, a.cfg.seed);
    a.cfg.validate();
    const Tokenizer tokenizer = make_tokenizer(a.vocab);

    auto qa = load_qa_pairs(a.qa);
    log_issues(log, a.qa, qa.issues);
    auto reviews = load_reviews(a.reviews);
    log_issues(log, a.reviews, reviews.issues);
    log.info("loaded " + std::to_string(qa.value.size()) + " qa pairs, " +
             std::to_string(reviews.value.size()) + " reviews");
    try {
        generation_order(qa.value, reviews.value);
    } catch (const DataError& e) {
        throw DataError("generate: " + a.qa + " and " + a.reviews + ": " + e.what());
    }

    const ordered_json config = gen_config_json(a.cfg, a.vocab);
    auto out = open_out(a.out);
    out << header_record("generate", config).dump() << '\n';
    const GenReport report = generate_dataset(
        qa.value, reviews.value, a.cfg, tokenizer,
        [&](const PretuneExample& ex) { out << to_json(ex).dump() << '\n'; }, kBatch);
    out.close();
    if (!out) throw DataError("write failed: " + a.out);

    log.info("generate: attempts=" + std::to_string(report.attempts) +
             " emitted=" + std::to_string(report.emitted) +
             " skipped=" + std::to_string(report.skipped) +
             " negatives=" + std::to_string(report.negatives));
    ordered_json counts = report_json(report);
    counts["qa_rejected"] = qa.issues.size();
    counts["reviews_rejected"] = reviews.issues.size();
    write_manifest(manifest_path(common, a.out), "generate", {a.qa, a.reviews}, config, counts);
    return ok;
}

// ---------------------------------------------------------------- format

struct FormatArgs {
    std::string dialogues, out, vocab, context_pred;
    ContextWindow window;
    FormatBudget budget;
};

int run_format(const FormatArgs& a, const Common& common, const Logger& log) {
    if (a.budget.max_left >= a.budget.max_len || a.budget.max_left < 4) {
        throw UsageError("need 4 <= max_left < max_len");
    }
    const Tokenizer tokenizer = make_tokenizer(a.vocab);
    auto loaded = load_rcrc_dialogues(a.dialogues);
    log_issues(log, a.dialogues, loaded.issues);

    std::vector<std::string> inputs = {a.dialogues};
    ContextOverrides overrides;
    if (!a.context_pred.empty()) {
        inputs.push_back(a.context_pred);
        std::ifstream in(a.context_pred);
        if (!in) throw DataError("cannot read " + a.context_pred);
        for (auto& p : read_predictions(in)) {
            if (!overrides.emplace(std::pair{p.dialogue_id, p.turn_id}, p.answer_text).second) {
                throw DataError("duplicate prediction for " + p.dialogue_id + "/" +
                                std::to_string(p.turn_id));
            }
        }
    }

    const auto outcomes = format_dialogues(loaded.value.dialogues, a.window, a.budget, tokenizer,
                                           a.context_pred.empty() ? nullptr : &overrides);
    const FormatReport report = summarize(outcomes);

    ordered_json config;
    config["max_turns"] = a.window.max_turns;
    config["max_len"] = a.budget.max_len;
    config["max_left"] = a.budget.max_left;
    config["tokenizer"] = a.vocab.empty() ? "basic" : "wordpiece";
    config["context_answers"] = a.context_pred.empty() ? "gold" : "predictions";

    auto out = open_out(a.out);
    out << header_record("format", config).dump() << '\n';
    for (const auto& o : outcomes) {
        if (o.example) out << to_json(*o.example).dump() << '\n';
    }
    out.close();
    if (!out) throw DataError("write failed: " + a.out);

    for (const auto& is : report.issues) {
        log.warn("format: " + is.dialogue_id + "/" + std::to_string(is.turn_id) + ": " + is.message);
    }
    log.info("format: turns=" + std::to_string(report.turns) +
             " emitted=" + std::to_string(report.emitted) +
             " alignment_errors=" + std::to_string(report.issues.size()));

    ordered_json counts;
    counts["dialogues"] = loaded.value.dialogues.size();
    counts["dialogues_rejected"] = loaded.issues.size();
    counts["turns"] = report.turns;
    counts["emitted"] = report.emitted;
    counts["no_answer"] = report.no_answer;
    counts["review_truncated"] = report.review_truncated;
    counts["alignment_errors"] = ordered_json::array();
    for (const auto& is : report.issues) {
        counts["alignment_errors"].push_back(
            {{"dialogue_id", is.dialogue_id}, {"turn_id", is.turn_id}, {"message", is.message}});
    }
    write_manifest(manifest_path(common, a.out), "format", inputs, config, counts);
    return ok;
}

// ------------------------------------------------------------------ mask

struct MaskArgs {
    std::string in, out, vocab;
    MaskPolicy policy;
    std::uint64_t seed = 0;
    CLI::Option* seed_opt = nullptr;
};

std::string example_key(const ordered_json& rec) {
    if (rec.contains("pair_id") && rec["pair_id"].is_string()) {
        return rec["pair_id"].get<std::string>();
    }
    if (rec.contains("dialogue_id") && rec.contains("turn_id")) {
        return rec["dialogue_id"].get<std::string>() + "#" +
               std::to_string(rec["turn_id"].get<int>());
    }
    throw DataError("example has neither pair_id nor dialogue_id/turn_id");
}

int run_mask(MaskArgs a, const Common& common, const Logger& log) {
    a.seed = resolve_seed(a.seed_opt, a.seed);
    a.policy.validate();

    std::vector<std::string> vocab;
    if (!a.vocab.empty()) {
        auto full = load_vocab(a.vocab);
        vocab = replacement_vocabulary(full);
    } else {
        // First pass: the input's own token inventory.
        std::ifstream in(a.in);
        if (!in) throw DataError("cannot read " + a.in);
        std::set<std::string> seen;
        std::string line;
        while (std::getline(in, line)) {
            if (line.empty()) continue;
            const auto rec = json::parse(line, nullptr, false);
            if (rec.is_discarded()) throw DataError(a.in + ": invalid JSON line");
            if (is_header(rec) || !rec.contains("tokens")) continue;
            for (const auto& t : rec["tokens"]) seen.insert(t.get<std::string>());
        }
        std::vector<std::string> all(seen.begin(), seen.end());
        vocab = replacement_vocabulary(all);
    }

    ordered_json mask_cfg;
    mask_cfg["rate"] = a.policy.mask_rate;
    mask_cfg["replace_with_mask"] = a.policy.replace_with_mask;
    mask_cfg["replace_with_random"] = a.policy.replace_with_random;
    mask_cfg["keep_original"] = a.policy.keep_original;
    mask_cfg["protect_span"] = a.policy.protect_span;
    mask_cfg["seed"] = a.seed;
    mask_cfg["replacement_vocab"] = a.vocab.empty() ? std::string("input tokens") : a.vocab;
    mask_cfg["replacement_vocab_size"] = vocab.size();

    std::ifstream in(a.in);
    if (!in) throw DataError("cannot read " + a.in);
    auto out = open_out(a.out);

    std::size_t examples = 0, eligible = 0, masked = 0;
    std::size_t line_no = 0;
    bool header_written = false;
    std::vector<ordered_json> records;
    std::vector<MaskJob> jobs;
    auto write_header = [&](ordered_json upstream) {
        ordered_json config;
        if (!upstream.is_null()) config["upstream"] = std::move(upstream);
        config["mask"] = mask_cfg;
        out << header_record("mask", config).dump() << '\n';
        header_written = true;
    };
    auto flush = [&] {
        const auto results = mask_batch(jobs, a.policy, vocab);
        for (std::size_t i = 0; i < results.size(); ++i) {
            records[i]["tokens"] = results[i].tokens;
            set_mask_fields(records[i], results[i].records);
            masked += results[i].records.size();
            out << records[i].dump() << '\n';
        }
        records.clear();
        jobs.clear();
    };

    std::string line;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        auto rec = ordered_json::parse(line, nullptr, false);
        if (rec.is_discarded()) {
            throw DataError(a.in + " line " + std::to_string(line_no) + ": invalid JSON");
        }
        if (is_header(rec)) {
            if (!header_written) write_header(rec["header"]);
            continue;
        }
        if (!header_written) write_header(nullptr);
        if (!mask_records_from_json(rec).empty()) {
            throw DataError(a.in + " line " + std::to_string(line_no) + ": already masked");
        }
        MaskJob job;
        try {
            job.tokens = rec.at("tokens").get<std::vector<std::string>>();
            if (!rec.at("is_negative").get<bool>()) {
                job.answer = TokenSpan{rec.at("span_u").get<std::size_t>(),
                                       rec.at("span_v").get<std::size_t>()};
            }
        } catch (const nlohmann::json::exception& e) {
            throw DataError(a.in + " line " + std::to_string(line_no) + ": " + e.what());
        }
        const std::uint64_t repeat = rec.value("repeat", std::uint64_t{0});
        job.seed = derive_seed(a.seed, example_key(rec), repeat, SeedStream::mask);
        for (const auto& t : job.tokens) eligible += is_special(t) ? 0 : 1;
        ++examples;
        jobs.push_back(std::move(job));
        records.push_back(std::move(rec));
        if (jobs.size() == kBatch) flush();
    }
    if (!header_written) write_header(nullptr);
    if (!jobs.empty()) flush();
    out.close();
    if (!out) throw DataError("write failed: " + a.out);

    log.info("mask: examples=" + std::to_string(examples) + " eligible=" +
             std::to_string(eligible) + " selected=" + std::to_string(masked));
    ordered_json counts;
    counts["examples"] = examples;
    counts["eligible_tokens"] = eligible;
    counts["selected_tokens"] = masked;
    std::vector<std::string> inputs = {a.in};
    if (!a.vocab.empty()) inputs.push_back(a.vocab);
    write_manifest(manifest_path(common, a.out), "mask", inputs, mask_cfg, counts);
    return ok;
}

// ----------------------------------------------------------------- stats

struct StatsArgs {
    std::vector<std::string> dialogues;
    std::string format = "table";
    std::string out;
};

// "name=path" or a bare path named after its stem.
std::pair<std::string, std::string> named_path(const std::string& arg) {
    const auto eq = arg.find('=');
    if (eq != std::string::npos && eq > 0) return {arg.substr(0, eq), arg.substr(eq + 1)};
    return {fs::path(arg).stem().string(), arg};
}

int run_stats(const StatsArgs& a, const Common& common, std::ostream& stdout_, const Logger& log) {
    std::vector<std::pair<std::string, StatsTable>> tables;
    std::vector<std::string> inputs;
    ordered_json counts = ordered_json::object();
    for (const auto& arg : a.dialogues) {
        auto [name, path] = named_path(arg);
        inputs.push_back(path);
        auto loaded = load_rcrc_dialogues(path);
        log_issues(log, path, loaded.issues);
        tables.emplace_back(name, compute_stats(loaded.value.dialogues));
        counts[name] = {{"dialogues", loaded.value.dialogues.size()},
                        {"rejected_entries", loaded.issues.size()}};
    }
    std::ostringstream rendered;
    if (a.format == "json") {
        write_stats_json(rendered, tables);
    } else {
        write_stats_table(rendered, tables);
    }
    if (a.out.empty()) {
        stdout_ << rendered.str();
    } else {
        auto f = open_out(a.out);
        f << rendered.str();
    }
    const std::string mpath = manifest_path(common, a.out);
    if (!mpath.empty()) {
        write_manifest(mpath, "stats", inputs, {{"format", a.format}}, counts);
    }
    return ok;
}

// -------------------------------------------------------------- evaluate

struct EvaluateArgs {
    std::vector<std::string> gold, pred, domain;
    std::string out_report;
};

int run_evaluate(const EvaluateArgs& a, const Common& common, std::ostream& stdout_,
                 const Logger& log) {
    if (a.gold.size() != a.pred.size()) {
        throw UsageError("--gold and --pred must be given the same number of times");
    }
    if (!a.domain.empty() && a.domain.size() != a.gold.size()) {
        throw UsageError("--domain must be given once per --gold");
    }
    std::vector<std::pair<std::string, EvalReport>> reports;
    std::vector<std::string> inputs;
    for (std::size_t i = 0; i < a.gold.size(); ++i) {
        inputs.push_back(a.gold[i]);
        inputs.push_back(a.pred[i]);
        auto golds = load_rcrc_dialogues(a.gold[i]);
        log_issues(log, a.gold[i], golds.issues);
        std::ifstream in(a.pred[i]);
        if (!in) throw DataError("cannot read " + a.pred[i]);
        const auto preds = read_predictions(in);
        const std::string name =
            a.domain.empty() ? fs::path(a.gold[i]).stem().string() : a.domain[i];
        reports.emplace_back(name, evaluate(golds.value.dialogues, preds));
        const auto& r = reports.back().second;
        if (r.missing_predictions > 0) {
            log.warn(name + ": " + std::to_string(r.missing_predictions) +
                     " turn(s) without prediction scored 0");
        }
    }
    write_domain_table(stdout_, reports);

    ordered_json counts = ordered_json::object();
    for (const auto& [name, r] : reports) {
        counts[name] = {{"em", r.em}, {"f1", r.f1}, {"turns", r.turns}};
    }
    if (!a.out_report.empty()) {
        auto f = open_out(a.out_report);
        if (reports.size() == 1) {
            write_report_json(f, reports.front().second);
        } else {
            f << "{\"domains\": [\n";
            for (std::size_t i = 0; i < reports.size(); ++i) {
                f << "{\"name\": " << json(reports[i].first).dump() << ", \"report\":\n";
                write_report_json(f, reports[i].second);
                f << (i + 1 < reports.size() ? "},\n" : "}\n");
            }
            f << "]}\n";
        }
    }
    const std::string mpath = manifest_path(common, a.out_report);
    if (!mpath.empty()) {
        write_manifest(mpath, "evaluate", inputs, {{"scoring", "single-reference"}}, counts);
    }
    return ok;
}

void print_error(std::ostream& err, const char* kind, const std::string& message) {
    ordered_json e;
    e["error"] = {{"kind", kind}, {"message", message}};
    err << e.dump() << '\n';
}

}  // namespace

int dispatch(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Builds, checks and scores review conversational reading comprehension data",
                 kToolName};
    app.set_version_flag("--version", kToolVersion);
    app.set_config("--config", "", "TOML config file; flags override its values");
    app.require_subcommand(1);

    Common common;
    app.add_option("--jobs", common.jobs, "Worker threads (0 = OpenMP default)")
        ->check(CLI::NonNegativeNumber);
    app.add_flag("--quiet", common.quiet, "Only log warnings");
    app.add_option("--manifest", common.manifest, "Manifest path (default <out>.manifest.json)");

    IngestArgs ingest;
    auto* ingest_cmd = app.add_subcommand("ingest", "Validate and normalize input corpora");
    ingest_cmd->add_option("--qa", ingest.qa, "QA pairs JSONL");
    ingest_cmd->add_option("--reviews", ingest.reviews, "Reviews JSONL");
    ingest_cmd->add_option("--dialogues", ingest.dialogues, "CoQA-format dialogue JSON");
    ingest_cmd->add_option("--out", ingest.out, "Directory for normalized copies");
    ingest_cmd->add_option("--report", ingest.report, "Validation report JSON (default stdout)");

    GenerateArgs gen;
    auto* gen_cmd = app.add_subcommand("generate", "Synthesize span-labelled pre-tuning examples");
    gen_cmd->add_option("--qa", gen.qa, "QA pairs JSONL")->required();
    gen_cmd->add_option("--reviews", gen.reviews, "Reviews JSONL")->required();
    gen_cmd->add_option("--h-max", gen.cfg.h_max, "Maximum context turns")->capture_default_str();
    gen_cmd->add_option("--k", gen.cfg.k_repeats, "Passes over the QA pairs")
        ->capture_default_str();
    gen_cmd->add_option("--neg-prob", gen.cfg.neg_prob, "Probability of a distractor answer")
        ->capture_default_str();
    gen_cmd->add_option("--max-len", gen.cfg.max_len, "Token budget")->capture_default_str();
    gen_cmd->add_option("--max-left", gen.cfg.max_left, "Left-side token budget")
        ->capture_default_str();
    gen.seed_opt = gen_cmd->add_option("--seed", gen.cfg.seed, "Run seed (env RCRC_FORGE_SEED)");
    gen_cmd->add_option("--vocab", gen.vocab, "Word-piece vocabulary file");
    gen_cmd->add_option("--out", gen.out, "Output JSONL")->required();

    FormatArgs fmt;
    auto* fmt_cmd = app.add_subcommand("format", "Build fine-tuning examples from dialogues");
    fmt_cmd->add_option("--dialogues", fmt.dialogues, "CoQA-format dialogue JSON")->required();
    fmt_cmd->add_option("--max-turns", fmt.window.max_turns, "Context window in turns")
        ->capture_default_str();
    fmt_cmd->add_option("--max-len", fmt.budget.max_len, "Token budget")->capture_default_str();
    fmt_cmd->add_option("--max-left", fmt.budget.max_left, "Left-side token budget")
        ->capture_default_str();
    fmt_cmd->add_option("--context-pred", fmt.context_pred,
                        "Predictions JSONL used as prior-turn answers");
    fmt_cmd->add_option("--vocab", fmt.vocab, "Word-piece vocabulary file");
    fmt_cmd->add_option("--out", fmt.out, "Output JSONL")->required();

    MaskArgs mask;
    auto* mask_cmd = app.add_subcommand("mask", "Apply MLM masking to example JSONL");
    mask_cmd->add_option("--in", mask.in, "Example JSONL from generate or format")->required();
    mask_cmd->add_option("--out", mask.out, "Output JSONL")->required();
    mask_cmd->add_option("--rate", mask.policy.mask_rate, "Selection rate")->capture_default_str();
    mask_cmd->add_option("--replace-mask", mask.policy.replace_with_mask)->capture_default_str();
    mask_cmd->add_option("--replace-random", mask.policy.replace_with_random)
        ->capture_default_str();
    mask_cmd->add_option("--keep", mask.policy.keep_original)->capture_default_str();
    mask_cmd->add_flag("--protect-span", mask.policy.protect_span, "Never mask answer tokens");
    mask.seed_opt = mask_cmd->add_option("--seed", mask.seed, "Run seed (env RCRC_FORGE_SEED)");
    mask_cmd->add_option("--vocab", mask.vocab, "Replacement vocabulary file");

    StatsArgs stats;
    auto* stats_cmd = app.add_subcommand("stats", "Dataset statistics table");
    stats_cmd->add_option("--dialogues", stats.dialogues, "Dialogue JSON, optionally name=path")
        ->required();
    stats_cmd->add_option("--format", stats.format)
        ->check(CLI::IsMember({"json", "table"}))
        ->capture_default_str();
    stats_cmd->add_option("--out", stats.out, "Write here instead of stdout");

    EvaluateArgs ev;
    auto* ev_cmd = app.add_subcommand("evaluate", "Turn-level EM/F1");
    ev_cmd->add_option("--gold", ev.gold, "Gold dialogue JSON (repeatable)")->required();
    ev_cmd->add_option("--pred", ev.pred, "Predictions JSONL (repeatable)")->required();
    ev_cmd->add_option("--domain", ev.domain, "Column name per --gold");
    ev_cmd->add_option("--out-report", ev.out_report, "JSON report path");

    try {
        std::vector<std::string> reversed(args.rbegin(), args.rend());
        app.parse(reversed);
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return ok;
    } catch (const CLI::CallForAllHelp&) {
        out << app.help("", CLI::AppFormatMode::All);
        return ok;
    } catch (const CLI::CallForVersion&) {
        out << kToolVersion << '\n';
        return ok;
    } catch (const CLI::ParseError& e) {
        print_error(err, "usage", e.what());
        err << app.help();
        return usage_error;
    }

    const Logger log(err, common.quiet);
    if (common.jobs > 0) omp_set_num_threads(common.jobs);
    try {
        if (*ingest_cmd) return run_ingest(ingest, common, out, log);
        if (*gen_cmd) return run_generate(gen, common, log);
        if (*fmt_cmd) return run_format(fmt, common, log);
        if (*mask_cmd) return run_mask(mask, common, log);
        if (*stats_cmd) return run_stats(stats, common, out, log);
        if (*ev_cmd) return run_evaluate(ev, common, out, log);
    } catch (const UsageError& e) {
        print_error(err, "usage", e.what());
        return usage_error;
    } catch (const std::exception& e) {
        print_error(err, "data", e.what());
        return data_error;
    }
    print_error(err, "usage", "no subcommand");
    return usage_error;
}

int dispatch(int argc, char** argv) {
    std::vector<std::string> args(argv + 1, argv + argc);
    return dispatch(args, std::cout, std::cerr);
}

}  // namespace rcrc::cli
