// Acceptance suite: one PASS/FAIL line per criterion, non-zero exit on any
// failure. Set RCRC_DATA_DIR to a directory holding laptop/{train,test}.json
// and rest/{train,test}.json to also check the released dataset counts.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <sstream>
#include <string>
#include <unordered_map>
#include <vector>

#include "invariants.hpp"
#include "naive_metrics.hpp"
#include "random_answers.hpp"
#include "rcrc/cli.hpp"
#include "rcrc/corpus.hpp"
#include "rcrc/masking.hpp"
#include "rcrc/metrics.hpp"
#include "rcrc/pretune.hpp"
#include "rcrc/stats.hpp"
#include "synthetic.hpp"

namespace fs = std::filesystem;
using namespace rcrc;

namespace {

struct Verdict {
    enum Kind { pass, fail, skip } kind = pass;
    std::string detail;
};

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
    return std::chrono::duration<double>(Clock::now() - t0).count();
}

std::string fmt(const char* f, auto... args) {
    char buf[512];
    std::snprintf(buf, sizeof buf, f, args...);
    return buf;
}

int failures = 0;

void report(const std::string& name, const std::function<Verdict()>& body) {
    Verdict v;
    try {
        v = body();
    } catch (const std::exception& e) {
        v = {Verdict::fail, std::string("exception: ") + e.what()};
    }
    const char* tag = v.kind == Verdict::pass ? "PASS" : v.kind == Verdict::fail ? "FAIL" : "SKIP";
    if (v.kind == Verdict::fail) ++failures;
    std::printf("%s %-22s %s\n", tag, name.c_str(), v.detail.c_str());
    std::fflush(stdout);
}

Verdict verdict(bool ok, std::string detail) {
    return {ok ? Verdict::pass : Verdict::fail, std::move(detail)};
}

std::unordered_map<std::string, std::size_t> index_by_id(const QACorpus& qa) {
    std::unordered_map<std::string, std::size_t> m;
    for (std::size_t i = 0; i < qa.size(); ++i) m[qa[i].pair_id] = i;
    return m;
}

// Streams a generation run through the structural checks.
struct CheckedRun {
    GenReport report;
    std::size_t checked = 0;
    std::size_t violations = 0;
    std::size_t over_len = 0;
    std::size_t over_left = 0;
    std::string first_violation;
    std::vector<PretuneExample> kept;  // first examples, for masking
};

CheckedRun checked_generate(const testing::SyntheticCorpus& c, const GenConfig& cfg,
                            std::size_t keep_tokens = 0) {
    CheckedRun run;
    const auto ids = index_by_id(c.qa);
    std::size_t kept_tokens = 0;
    run.report = generate_dataset(c.qa, c.reviews, cfg, {}, [&](const PretuneExample& ex) {
        ++run.checked;
        if (ex.tokens.size() > cfg.max_len) ++run.over_len;
        if (ex.left_len > cfg.max_left) ++run.over_left;
        const std::string& source = ex.is_negative ? ex.distractor_pair_id : ex.pair_id;
        const auto answer = tokenize(c.qa[ids.at(source)].answer).tokens();
        if (auto e = testing::check_pretune(ex, cfg, answer); !e.empty()) {
            if (run.violations++ == 0) run.first_violation = ex.pair_id + ": " + e;
        }
        if (kept_tokens < keep_tokens) {
            for (const auto& t : ex.tokens) kept_tokens += is_special(t) ? 0 : 1;
            run.kept.push_back(ex);
        }
    });
    return run;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream s;
    s << in.rdbuf();
    return s.str();
}

Verdict stats_fixture() {
    const auto t0 = Clock::now();
    const auto loaded = load_rcrc_dialogues(RCRC_FIXTURE_DIR "/rcrc_fixture.json");
    const StatsTable t = compute_stats(loaded.value.dialogues);
    const double secs = seconds_since(t0);
    const bool ok = loaded.issues.empty() && t.n_reviews() == 2 && t.n_dialogues == 3 &&
                    t.n_dialogues_3plus == 2 && t.n_questions == 10 && t.pct_no_answer() == 30.0 &&
                    secs < 10.0;
    return verdict(ok, fmt("reviews=%zu dialogues=%zu 3+turns=%zu questions=%zu no-answer=%.1f%% "
                           "(want 2/3/2/10/30.0%%) %.3fs",
                           t.n_reviews(), t.n_dialogues, t.n_dialogues_3plus, t.n_questions,
                           t.pct_no_answer(), secs));
}

Verdict stats_released() {
    const char* dir = std::getenv("RCRC_DATA_DIR");
    if (!dir || !*dir) return {Verdict::skip, "RCRC_DATA_DIR not set; released files unavailable"};
    struct Want {
        const char* name;
        const char* path;
        std::size_t reviews, dialogues, three_plus, questions;
        double pct;
    };
    const Want wants[] = {{"laptop-train", "laptop/train.json", 445, 506, 375, 1679, 24.3},
                          {"laptop-test", "laptop/test.json", 79, 170, 148, 804, 26.6},
                          {"rest-train", "rest/train.json", 350, 382, 315, 1486, 24.2},
                          {"rest-test", "rest/test.json", 90, 160, 135, 803, 28.0}};
    const auto t0 = Clock::now();
    bool ok = true;
    std::string detail;
    for (const Want& w : wants) {
        const auto loaded = load_rcrc_dialogues(fs::path(dir) / w.path);
        const StatsTable t = compute_stats(loaded.value.dialogues);
        const bool row_ok = t.n_reviews() == w.reviews && t.n_dialogues == w.dialogues &&
                            t.n_dialogues_3plus == w.three_plus && t.n_questions == w.questions &&
                            std::abs(t.pct_no_answer() - w.pct) <= 0.05 + 1e-9;
        ok = ok && row_ok;
        detail += fmt("%s=%zu/%zu/%zu/%zu/%.1f%% ", w.name, t.n_reviews(), t.n_dialogues,
                      t.n_dialogues_3plus, t.n_questions, t.pct_no_answer());
    }
    const double secs = seconds_since(t0);
    return verdict(ok && secs < 10.0, detail + fmt("%.2fs", secs));
}

Verdict span_integrity() {
    const auto corpus = testing::make_synthetic_corpus({.entities = 20, .pairs_per_entity = 50});
    GenConfig cfg;
    cfg.k_repeats = 12;
    cfg.seed = 101;
    const auto t0 = Clock::now();
    const CheckedRun run = checked_generate(corpus, cfg);
    const double secs = seconds_since(t0);
    const GenReport& r = run.report;
    const bool ok = run.checked >= 10000 && run.violations == 0 && secs < 30.0;
    return verdict(ok, fmt("examples=%zu positives=%zu negatives=%zu violations=%zu %s%.2fs",
                           run.checked, r.positives, r.negatives, run.violations,
                           run.first_violation.empty() ? "" : ("[" + run.first_violation + "] ").c_str(),
                           secs));
}

struct LargeRun {
    testing::SyntheticCorpus corpus;
    GenConfig cfg;
    CheckedRun run;
};

const LargeRun& large_run() {
    static const LargeRun lr = [] {
        LargeRun l;
        l.corpus = testing::make_synthetic_corpus({.entities = 100, .pairs_per_entity = 100});
        l.cfg.k_repeats = 11;
        l.cfg.h_max = 9;
        l.cfg.neg_prob = 0.5;
        l.cfg.seed = 2024;
        l.run = checked_generate(l.corpus, l.cfg, 120000);
        return l;
    }();
    return lr;
}

Verdict negative_rate() {
    const GenReport& r = large_run().run.report;
    const double frac = double(r.negatives) / double(r.attempts);
    const bool ok = r.attempts >= 100000 && std::abs(frac - 0.5) <= 0.02 && r.negative_fallbacks == 0;
    return verdict(ok, fmt("attempts=%zu negatives=%zu fraction=%.4f (want 0.5 +- 0.02) fallbacks=%zu",
                           r.attempts, r.negatives, frac, r.negative_fallbacks));
}

Verdict h_uniformity() {
    const GenReport& r = large_run().run.report;
    const std::size_t buckets = large_run().cfg.h_max + 1;
    const double expected = double(r.emitted) / double(buckets);
    double worst = 0.0;
    std::string hist;
    for (std::size_t h = 0; h < buckets; ++h) {
        const std::size_t n = h < r.h_histogram.size() ? r.h_histogram[h] : 0;
        worst = std::max(worst, std::abs(double(n) - expected) / expected);
        hist += (h ? "," : "") + std::to_string(n);
    }
    const bool extra = r.h_histogram.size() > buckets;
    const bool ok = r.emitted >= 100000 && worst <= 0.10 && !extra && r.context_truncated == 0;
    return verdict(ok, fmt("examples=%zu h_used=[%s] max relative deviation=%.4f (want <= 0.10) "
                           "context_truncated=%zu",
                           r.emitted, hist.c_str(), worst, r.context_truncated));
}

Verdict budgets() {
    const CheckedRun& main = large_run().run;
    // long questions, long reviews and answers that cannot fit
    const auto stress_corpus = testing::make_synthetic_corpus(
        {.entities = 10, .pairs_per_entity = 100, .reviews_per_entity = 5, .max_question_words = 40,
         .max_answer_words = 250, .max_sentences = 40, .max_sentence_words = 40, .seed = 9});
    GenConfig cfg;
    cfg.k_repeats = 3;
    const CheckedRun stress = checked_generate(stress_corpus, cfg);
    const GenReport& s = stress.report;
    const std::size_t over_len = main.over_len + stress.over_len;
    const std::size_t over_left = main.over_left + stress.over_left;
    const bool accounted = main.report.emitted + main.report.skipped == main.report.attempts &&
                           s.emitted + s.skipped == s.attempts && s.skipped == s.skipped_answer_too_long;
    const bool ok = over_len == 0 && over_left == 0 && accounted && stress.violations == 0 &&
                    s.skipped > 0 && s.context_truncated > 0;
    return verdict(ok, fmt("over max_len=%zu over max_left=%zu; synthetic run skipped=%zu of %zu; "
                           "stress run emitted=%zu skipped=%zu (answer_too_long=%zu) "
                           "context_truncated=%zu",
                           over_len, over_left, main.report.skipped, main.report.attempts, s.emitted,
                           s.skipped, s.skipped_answer_too_long, s.context_truncated));
}

Verdict masking() {
    const auto& kept = large_run().run.kept;
    std::vector<MaskJob> jobs;
    std::vector<std::string> inventory;
    for (const auto& ex : kept) {
        MaskJob job;
        job.tokens = ex.tokens;
        if (!ex.is_negative) job.answer = ex.span;
        job.seed = derive_seed(77, ex.pair_id, ex.repeat, SeedStream::mask);
        inventory.insert(inventory.end(), ex.tokens.begin(), ex.tokens.end());
        jobs.push_back(std::move(job));
    }
    const std::vector<std::string> vocab = replacement_vocabulary(inventory);
    const MaskPolicy policy;
    const auto masked = mask_batch(jobs, policy, vocab);
    std::size_t eligible = 0, selected = 0, irreversible = 0, specials = 0;
    for (std::size_t i = 0; i < jobs.size(); ++i) {
        for (const auto& t : jobs[i].tokens) eligible += is_special(t) ? 0 : 1;
        selected += masked[i].records.size();
        if (unmask(masked[i].tokens, masked[i].records) != jobs[i].tokens) ++irreversible;
        for (const auto& rec : masked[i].records) {
            if (is_special(jobs[i].tokens[rec.position])) ++specials;
        }
    }
    const double frac = double(selected) / double(eligible);
    const bool ok = eligible >= 100000 && std::abs(frac - 0.15) <= 0.005 && irreversible == 0 && specials == 0;
    return verdict(ok, fmt("examples=%zu eligible=%zu selected=%zu fraction=%.4f (want 0.15 +- 0.005) "
                           "irreversible=%zu specials masked=%zu",
                           jobs.size(), eligible, selected, frac, irreversible, specials));
}

Verdict metric_oracle() {
    Rng rng(31337);
    std::size_t mismatches = 0, matches = 0;
    for (int i = 0; i < 1000; ++i) {
        const auto gold = testing::random_answer(rng);
        const auto pred = testing::related_answer(rng, gold);
        const Answer g = gold ? Answer{std::string_view(*gold)} : Answer{};
        const Answer p = pred ? Answer{std::string_view(*pred)} : Answer{};
        const int em = exact_match(p, g);
        const double f1 = token_f1(p, g);
        if (em != testing::naive_em(pred, gold) || f1 != testing::naive_f1(pred, gold)) ++mismatches;
        matches += static_cast<std::size_t>(em);
    }
    const double hand = token_f1("fast", "amazingly fast");
    const bool hand_ok = std::abs(hand - 0.6667) <= 1e-4 && std::abs(hand - 2.0 / 3.0) <= 1e-9 &&
                         exact_match("The Retina is great", "the retina is great") == 1 &&
                         normalize_answer("The SSD!") == "ssd";
    return verdict(mismatches == 0 && hand_ok,
                   fmt("1000 random pairs: mismatches=%zu (exact matches=%zu); F1(fast, amazingly fast)=%.10f",
                       mismatches, matches, hand));
}

Verdict determinism() {
    const fs::path dir = fs::temp_directory_path() / "rcrc_acceptance_determinism";
    fs::remove_all(dir);
    fs::create_directories(dir);
    const auto corpus = testing::make_synthetic_corpus({.entities = 30, .pairs_per_entity = 60});
    {
        std::ofstream q(dir / "qa.jsonl"), r(dir / "reviews.jsonl");
        write_qa_pairs(q, corpus.qa);
        write_reviews(r, corpus.reviews);
    }
    auto generate = [&](const std::string& jobs, const std::string& out) {
        std::ostringstream o, e;
        return cli::dispatch({"--quiet", "--jobs", jobs, "generate", "--qa", (dir / "qa.jsonl").string(),
                              "--reviews", (dir / "reviews.jsonl").string(), "--k", "3", "--seed", "12345",
                              "--out", (dir / out).string()},
                             o, e);
    };
    const int c1 = generate("1", "jobs1.jsonl");
    const int c8 = generate("8", "jobs8.jsonl");
    const std::string a = slurp(dir / "jobs1.jsonl");
    const std::string b = slurp(dir / "jobs8.jsonl");
    const bool ok = c1 == 0 && c8 == 0 && !a.empty() && a == b;
    return verdict(ok, fmt("exit codes %d/%d, %zu vs %zu bytes, identical=%s", c1, c8, a.size(), b.size(),
                           a == b ? "yes" : "no"));
}

}  // namespace

int main() {
    report("stats-fixture", stats_fixture);
    report("stats-released", stats_released);
    report("span-integrity", span_integrity);
    report("negative-rate", negative_rate);
    report("h-uniformity", h_uniformity);
    report("budgets", budgets);
    report("masking", masking);
    report("metric-oracle", metric_oracle);
    report("determinism", determinism);
    std::printf("%s: %d failing criteria\n", failures ? "FAILED" : "OK", failures);
    return failures ? 1 : 0;
}
