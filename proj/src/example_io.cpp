#include "rcrc/example_io.hpp"

#include "rcrc/error.hpp"
#include "rcrc/masking.hpp"
#include "rcrc/version.hpp"

namespace rcrc {

namespace {

template <typename Example>
ordered_json common_fields(const Example& ex) {
    ordered_json rec;
    rec["tokens"] = ex.tokens;
    rec["left_len"] = ex.left_len;
    rec["span_u"] = ex.span.u;
    rec["span_v"] = ex.span.v;
    return rec;
}

}  // namespace

void set_mask_fields(ordered_json& rec, const std::vector<MaskRecord>& records) {
    ordered_json positions = ordered_json::array();
    ordered_json labels = ordered_json::array();
    ordered_json actions = ordered_json::array();
    for (const auto& r : records) {
        positions.push_back(r.position);
        labels.push_back(r.original);
        actions.push_back(std::string(to_string(r.action)));
    }
    rec["mask_positions"] = std::move(positions);
    rec["mask_labels"] = std::move(labels);
    rec["mask_actions"] = std::move(actions);
}

ordered_json to_json(const PretuneExample& ex) {
    ordered_json rec = common_fields(ex);
    rec["is_negative"] = ex.is_negative;
    rec["pair_id"] = ex.pair_id;
    rec["review_id"] = ex.review_id;
    rec["h_used"] = ex.h_used;
    rec["l"] = ex.slot;
    set_mask_fields(rec, ex.mask_records);
    rec["distractor_pair_id"] =
        ex.is_negative ? ordered_json(ex.distractor_pair_id) : ordered_json(nullptr);
    rec["repeat"] = ex.repeat;
    rec["h_drawn"] = ex.h_drawn;
    rec["context_truncated"] = ex.context_truncated;
    rec["negative_fallback"] = ex.negative_fallback;
    rec["answer_leak"] = ex.answer_leak;
    return rec;
}

ordered_json to_json(const RCRCExample& ex) {
    ordered_json rec = common_fields(ex);
    rec["is_negative"] = ex.is_no_answer;
    rec["pair_id"] = nullptr;
    rec["review_id"] = ex.review_id;
    rec["h_used"] = ex.context_turns;
    rec["l"] = nullptr;
    set_mask_fields(rec, ex.mask_records);
    rec["dialogue_id"] = ex.dialogue_id;
    rec["turn_id"] = ex.turn_id;
    rec["review_offset"] = ex.review_offset;
    rec["review_truncated"] = ex.review_truncated;
    return rec;
}

std::vector<MaskRecord> mask_records_from_json(const nlohmann::json& rec) {
    std::vector<MaskRecord> out;
    if (!rec.contains("mask_positions")) return out;
    const auto& pos = rec.at("mask_positions");
    const auto& labels = rec.at("mask_labels");
    const auto& actions = rec.at("mask_actions");
    if (pos.size() != labels.size() || pos.size() != actions.size()) {
        throw DataError("mask fields differ in length");
    }
    for (std::size_t i = 0; i < pos.size(); ++i) {
        out.push_back({pos[i].get<std::size_t>(), labels[i].get<std::string>(),
                       parse_mask_action(actions[i].get<std::string>())});
    }
    return out;
}

PretuneExample pretune_from_json(const nlohmann::json& rec) {
    try {
        PretuneExample ex;
        ex.tokens = rec.at("tokens").get<std::vector<std::string>>();
        ex.left_len = rec.at("left_len").get<std::size_t>();
        ex.span = {rec.at("span_u").get<std::size_t>(), rec.at("span_v").get<std::size_t>()};
        ex.is_negative = rec.at("is_negative").get<bool>();
        if (rec.contains("pair_id") && rec["pair_id"].is_string()) {
            ex.pair_id = rec["pair_id"].get<std::string>();
        }
        ex.review_id = rec.value("review_id", std::string());
        if (rec.contains("distractor_pair_id") && rec["distractor_pair_id"].is_string()) {
            ex.distractor_pair_id = rec["distractor_pair_id"].get<std::string>();
        }
        ex.h_used = rec.value("h_used", std::size_t{0});
        if (rec.contains("l") && rec["l"].is_number()) ex.slot = rec["l"].get<std::size_t>();
        ex.repeat = rec.value("repeat", std::size_t{0});
        ex.h_drawn = rec.value("h_drawn", ex.h_used);
        ex.context_truncated = rec.value("context_truncated", false);
        ex.negative_fallback = rec.value("negative_fallback", false);
        ex.answer_leak = rec.value("answer_leak", false);
        ex.mask_records = mask_records_from_json(rec);
        return ex;
    } catch (const nlohmann::json::exception& e) {
        throw DataError(std::string("malformed example record: ") + e.what());
    }
}

ordered_json header_record(const std::string& subcommand, const ordered_json& config) {
    ordered_json h;
    h["tool"] = kToolName;
    h["version"] = kToolVersion;
    h["subcommand"] = subcommand;
    h["config"] = config;
    ordered_json rec;
    rec["header"] = std::move(h);
    return rec;
}

bool is_header(const nlohmann::json& rec) {
    return rec.is_object() && rec.size() == 1 && rec.contains("header");
}

}  // namespace rcrc
