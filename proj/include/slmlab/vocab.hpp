// Vocabulary layout, frame layout, and speech frames.
//
// Token id spaces used throughout:
//   * global ids: [special | text | prosody | content], contiguous segments.
//   * speech-space ids: prosody tokens in [0, prosody_size), content tokens
//     in [prosody_size, prosody_size + content_size). SpeechFrame and the
//     interleaving operations work in speech space; assembled contexts and
//     the model work in global ids (speech space shifted by prosody_offset).
#pragma once

#include <array>
#include <string>
#include <vector>

#include "slmlab/common.hpp"

namespace slmlab {

enum class Segment { special, text, prosody, content };

enum class SlotRole { prosody, content };

struct Vocabulary {
    // Reserved ids inside the special segment.
    static constexpr int PAD = 0;
    static constexpr int BOS = 1;
    static constexpr int EOS_TEXT = 2;
    static constexpr int EOS_SPEECH = 3;
    static constexpr int MARK_TA = 4;
    static constexpr int MARK_UA = 5;
    static constexpr int MARK_SPK = 6;
    static constexpr int SPK_SLOT = 7;
    static constexpr int kSpecialCount = 8;

    int text_size = 96;
    int prosody_size = 64;
    int content_size = 128;

    constexpr int special_offset() const { return 0; }
    constexpr int text_offset() const { return kSpecialCount; }
    int prosody_offset() const { return text_offset() + text_size; }
    int content_offset() const { return prosody_offset() + prosody_size; }
    int total_size() const { return content_offset() + content_size; }

    // Rows covered by the language head: specials plus text.
    int text_head_size() const { return text_offset() + text_size; }
    int speech_space_size() const { return prosody_size + content_size; }

    Segment segment_of(int id) const {
        if (id < 0 || id >= total_size()) {
            throw LayoutError("token id " + std::to_string(id) + " outside vocabulary");
        }
        if (id < text_offset()) return Segment::special;
        if (id < prosody_offset()) return Segment::text;
        if (id < content_offset()) return Segment::prosody;
        return Segment::content;
    }

    int text_token(int char_index) const {
        if (char_index < 0 || char_index >= text_size) {
            throw LayoutError("character index outside text segment");
        }
        return text_offset() + char_index;
    }
    int char_index(int text_id) const { return text_id - text_offset(); }

    int speech_to_global(int speech_id) const {
        if (speech_id < 0 || speech_id >= speech_space_size()) {
            throw LayoutError("speech-space id out of range");
        }
        return prosody_offset() + speech_id;
    }
    int global_to_speech(int global_id) const {
        const int s = global_id - prosody_offset();
        if (s < 0 || s >= speech_space_size()) {
            throw LayoutError("global id not in a speech segment");
        }
        return s;
    }

    bool speech_id_in_role(int speech_id, SlotRole role) const {
        if (role == SlotRole::prosody) {
            return speech_id >= 0 && speech_id < prosody_size;
        }
        return speech_id >= prosody_size && speech_id < speech_space_size();
    }
};

struct FrameLayout {
    int slots_per_frame = 3;
    std::vector<SlotRole> slot_roles{SlotRole::prosody, SlotRole::content, SlotRole::content};

    void validate() const {
        if (slots_per_frame <= 0 ||
            static_cast<int>(slot_roles.size()) != slots_per_frame) {
            throw ConfigError("slot_roles length must equal slots_per_frame");
        }
    }

    SlotRole role_at(int flat_index) const {
        return slot_roles[flat_index % slots_per_frame];
    }
};

// One codec frame of speech-space token ids, one per slot.
struct SpeechFrame {
    std::vector<int> tokens;

    bool operator==(const SpeechFrame&) const = default;
};

inline void validate_frame(const SpeechFrame& frame, const FrameLayout& layout,
                           const Vocabulary& vocab) {
    if (static_cast<int>(frame.tokens.size()) != layout.slots_per_frame) {
        throw LayoutError("frame has " + std::to_string(frame.tokens.size()) +
                          " slots, layout demands " + std::to_string(layout.slots_per_frame));
    }
    for (int k = 0; k < layout.slots_per_frame; ++k) {
        if (!vocab.speech_id_in_role(frame.tokens[k], layout.slot_roles[k])) {
            throw LayoutError("token " + std::to_string(frame.tokens[k]) +
                              " at slot " + std::to_string(k) +
                              " violates its slot role");
        }
    }
}

}  // namespace slmlab
