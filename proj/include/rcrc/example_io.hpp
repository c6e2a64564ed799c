#pragma once

#include <string>
#include <vector>

#include "json.hpp"
#include "rcrc/finetune.hpp"
#include "rcrc/pretune.hpp"

namespace rcrc {

using ordered_json = nlohmann::ordered_json;

// One JSONL line per example. Both shapes share the fields
//   tokens, left_len, span_u, span_v, is_negative, pair_id, review_id,
//   h_used, l, mask_positions, mask_labels, mask_actions
// with null where a field does not apply; fine-tuning examples add
// dialogue_id, turn_id, review_offset and review_truncated.
ordered_json to_json(const PretuneExample& ex);
ordered_json to_json(const RCRCExample& ex);

PretuneExample pretune_from_json(const nlohmann::json& rec);

// Mask records stored on an example line.
std::vector<MaskRecord> mask_records_from_json(const nlohmann::json& rec);
void set_mask_fields(ordered_json& rec, const std::vector<MaskRecord>& records);

// First line of every JSONL output: {"header": {...}}.
ordered_json header_record(const std::string& subcommand, const ordered_json& config);
bool is_header(const nlohmann::json& rec);

}  // namespace rcrc
