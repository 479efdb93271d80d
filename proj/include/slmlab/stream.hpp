// Token streams: interleaving schemes, group packing, context assembly,
// and the line-per-example text serialization.
#pragma once

#include <algorithm>
#include <iosfwd>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "slmlab/vocab.hpp"

namespace slmlab {

enum class Tag { speaker, text_q, text_a, speech_a, special };

inline const char* tag_name(Tag t) {
    switch (t) {
        case Tag::speaker: return "spk";
        case Tag::text_q: return "tq";
        case Tag::text_a: return "ta";
        case Tag::speech_a: return "sa";
        case Tag::special: return "x";
    }
    return "?";
}

inline Tag tag_from_name(const std::string& s) {
    if (s == "spk") return Tag::speaker;
    if (s == "tq") return Tag::text_q;
    if (s == "ta") return Tag::text_a;
    if (s == "sa") return Tag::speech_a;
    if (s == "x") return Tag::special;
    throw FormatError("unknown segment tag '" + s + "'");
}

// Tagged token sequence with a parallel loss mask. Ids are global.
struct TokenStream {
    std::vector<int> tokens;
    std::vector<Tag> tags;
    std::vector<bool> loss_mask;

    std::size_t size() const { return tokens.size(); }

    void push(int id, Tag tag, bool masked) {
        tokens.push_back(id);
        tags.push_back(tag);
        loss_mask.push_back(masked);
    }

    void validate(const Vocabulary& vocab) const {
        if (tags.size() != tokens.size() || loss_mask.size() != tokens.size()) {
            throw FormatError("stream lists have unequal lengths");
        }
        for (std::size_t i = 0; i < tokens.size(); ++i) {
            const Segment seg = vocab.segment_of(tokens[i]);
            const Tag tag = tags[i];
            const bool ok =
                (tag == Tag::special && seg == Segment::special) ||
                (tag == Tag::speaker && seg == Segment::special) ||
                ((tag == Tag::text_q || tag == Tag::text_a) && seg == Segment::text) ||
                (tag == Tag::speech_a && (seg == Segment::prosody || seg == Segment::content));
            if (!ok) {
                throw FormatError("token at position " + std::to_string(i) +
                                  " lies outside the segment its tag claims");
            }
        }
    }

    bool operator==(const TokenStream&) const = default;
};

// ---------------------------------------------------------------------------
// Interleaving

inline std::vector<int> interleave_fwi(const std::vector<SpeechFrame>& frames,
                                       const FrameLayout& layout,
                                       const Vocabulary& vocab) {
    std::vector<int> out;
    out.reserve(frames.size() * layout.slots_per_frame);
    for (const auto& frame : frames) {
        validate_frame(frame, layout, vocab);
        out.insert(out.end(), frame.tokens.begin(), frame.tokens.end());
    }
    return out;
}

inline std::vector<int> interleave_cwi(const std::vector<SpeechFrame>& frames,
                                       const FrameLayout& layout,
                                       const Vocabulary& vocab, int chunk_len = 80) {
    if (chunk_len < 1) throw ConfigError("chunk_len must be >= 1");
    std::vector<int> out;
    out.reserve(frames.size() * layout.slots_per_frame);
    for (std::size_t chunk = 0; chunk < frames.size(); chunk += chunk_len) {
        const std::size_t end = std::min(frames.size(), chunk + chunk_len);
        for (int slot = 0; slot < layout.slots_per_frame; ++slot) {
            for (std::size_t i = chunk; i < end; ++i) {
                validate_frame(frames[i], layout, vocab);
                out.push_back(frames[i].tokens[slot]);
            }
        }
    }
    return out;
}

enum class InterleaveScheme { fwi, cwi };

inline std::vector<SpeechFrame> deinterleave(const std::vector<int>& tokens,
                                             InterleaveScheme scheme,
                                             const FrameLayout& layout,
                                             const Vocabulary& vocab,
                                             int chunk_len = 80) {
    const int spf = layout.slots_per_frame;
    if (tokens.size() % spf != 0) {
        throw FramingError("token count " + std::to_string(tokens.size()) +
                           " not divisible by " + std::to_string(spf));
    }
    const std::size_t n_frames = tokens.size() / spf;
    std::vector<SpeechFrame> frames(n_frames);
    for (auto& f : frames) f.tokens.assign(spf, 0);

    auto place = [&](std::size_t frame_idx, int slot, std::size_t src_pos) {
        const int id = tokens[src_pos];
        if (!vocab.speech_id_in_role(id, layout.slot_roles[slot])) {
            throw LayoutError("token " + std::to_string(id) + " at position " +
                              std::to_string(src_pos) + " violates slot role");
        }
        frames[frame_idx].tokens[slot] = id;
    };

    if (scheme == InterleaveScheme::fwi) {
        for (std::size_t i = 0; i < n_frames; ++i) {
            for (int slot = 0; slot < spf; ++slot) place(i, slot, i * spf + slot);
        }
    } else {
        if (chunk_len < 1) throw ConfigError("chunk_len must be >= 1");
        std::size_t pos = 0;
        for (std::size_t chunk = 0; chunk < n_frames; chunk += chunk_len) {
            const std::size_t end = std::min(n_frames, chunk + chunk_len);
            for (int slot = 0; slot < spf; ++slot) {
                for (std::size_t i = chunk; i < end; ++i) place(i, slot, pos++);
            }
        }
    }
    return frames;
}

// ---------------------------------------------------------------------------
// Group packing

// g consecutive tokens decoded from one hidden state. member_ids always has
// size g; the final group of a span may carry trailing pad_id fillers, with
// real_count telling how many leading members are real.
struct TokenGroup {
    std::vector<int> member_ids;
    int real_count = 0;

    int size() const { return static_cast<int>(member_ids.size()); }
    bool is_padded() const { return real_count < size(); }

    bool operator==(const TokenGroup&) const = default;
};

inline std::vector<TokenGroup> pack_groups(const std::vector<int>& tokens, int g,
                                           const FrameLayout& layout, int pad_id) {
    if (g <= 0 || g % layout.slots_per_frame != 0) {
        throw ConfigError("group size " + std::to_string(g) +
                          " is not a positive multiple of slots_per_frame");
    }
    std::vector<TokenGroup> groups;
    groups.reserve((tokens.size() + g - 1) / g);
    for (std::size_t start = 0; start < tokens.size(); start += g) {
        TokenGroup group;
        group.member_ids.assign(g, pad_id);
        const std::size_t end = std::min(tokens.size(), start + g);
        group.real_count = static_cast<int>(end - start);
        std::copy(tokens.begin() + start, tokens.begin() + end, group.member_ids.begin());
        groups.push_back(std::move(group));
    }
    return groups;
}

inline std::vector<int> unpack_groups(const std::vector<TokenGroup>& groups) {
    std::vector<int> out;
    for (const auto& group : groups) {
        out.insert(out.end(), group.member_ids.begin(),
                   group.member_ids.begin() + group.real_count);
    }
    return out;
}

// ---------------------------------------------------------------------------
// Context assembly

enum class Task { tts, asr, role_qa };

struct ContextParts {
    std::optional<int> speaker_slot;        // present => speaker-aware context
    std::vector<int> text;                  // tts/asr text, or role_qa question (global text ids)
    std::vector<int> answer_text;           // role_qa text answer
    std::vector<SpeechFrame> frames;        // speech span
};

namespace detail {

inline void push_text(TokenStream& s, const std::vector<int>& ids,
                      const Vocabulary& vocab, Tag tag, bool masked) {
    for (int id : ids) {
        if (vocab.segment_of(id) != Segment::text) {
            throw FormatError("text part contains a non-text token id");
        }
        s.push(id, tag, masked);
    }
}

inline void push_speech(TokenStream& s, const std::vector<SpeechFrame>& frames,
                        const FrameLayout& layout, const Vocabulary& vocab, bool masked) {
    for (int id : interleave_fwi(frames, layout, vocab)) {
        s.push(vocab.speech_to_global(id), Tag::speech_a, masked);
    }
}

inline void push_speaker(TokenStream& s) {
    s.push(Vocabulary::MARK_SPK, Tag::special, false);
    s.push(Vocabulary::SPK_SLOT, Tag::speaker, false);
}

}  // namespace detail

// Builds the full training stream for a task. Loss mask covers the answer
// span including its closing delimiter tokens.
//   tts:     [MARK_SPK spk]? text EOS_TEXT | speech EOS_SPEECH
//   asr:     speech EOS_SPEECH | text EOS_TEXT
//   role_qa: [MARK_SPK spk]? question MARK_TA | answer MARK_UA speech EOS_SPEECH
inline TokenStream assemble_context(Task task, const ContextParts& parts,
                                    const FrameLayout& layout, const Vocabulary& vocab) {
    TokenStream s;
    switch (task) {
        case Task::tts: {
            if (parts.text.empty()) throw FormatError("tts requires text");
            if (parts.frames.empty()) throw FormatError("tts requires speech frames");
            if (parts.speaker_slot) detail::push_speaker(s);
            detail::push_text(s, parts.text, vocab, Tag::text_q, false);
            s.push(Vocabulary::EOS_TEXT, Tag::special, false);
            detail::push_speech(s, parts.frames, layout, vocab, true);
            s.push(Vocabulary::EOS_SPEECH, Tag::special, true);
            break;
        }
        case Task::asr: {
            if (parts.frames.empty()) throw FormatError("asr requires speech frames");
            if (parts.text.empty()) throw FormatError("asr requires text");
            detail::push_speech(s, parts.frames, layout, vocab, false);
            s.push(Vocabulary::EOS_SPEECH, Tag::special, false);
            detail::push_text(s, parts.text, vocab, Tag::text_a, true);
            s.push(Vocabulary::EOS_TEXT, Tag::special, true);
            break;
        }
        case Task::role_qa: {
            if (parts.text.empty()) throw FormatError("role_qa requires a question");
            if (parts.answer_text.empty()) throw FormatError("role_qa requires a text answer");
            if (parts.frames.empty()) throw FormatError("role_qa requires a speech answer");
            if (parts.speaker_slot) detail::push_speaker(s);
            detail::push_text(s, parts.text, vocab, Tag::text_q, false);
            s.push(Vocabulary::MARK_TA, Tag::special, false);
            detail::push_text(s, parts.answer_text, vocab, Tag::text_a, true);
            s.push(Vocabulary::MARK_UA, Tag::special, true);
            detail::push_speech(s, parts.frames, layout, vocab, true);
            s.push(Vocabulary::EOS_SPEECH, Tag::special, true);
            break;
        }
    }
    return s;
}

// Prompt prefix used at inference time (everything before the answer span).
inline TokenStream assemble_prompt(Task task, const ContextParts& parts,
                                   const FrameLayout& layout, const Vocabulary& vocab) {
    TokenStream s;
    switch (task) {
        case Task::tts: {
            if (parts.text.empty()) throw FormatError("tts requires text");
            if (parts.speaker_slot) detail::push_speaker(s);
            detail::push_text(s, parts.text, vocab, Tag::text_q, false);
            s.push(Vocabulary::EOS_TEXT, Tag::special, false);
            break;
        }
        case Task::asr: {
            if (parts.frames.empty()) throw FormatError("asr requires speech frames");
            detail::push_speech(s, parts.frames, layout, vocab, false);
            s.push(Vocabulary::EOS_SPEECH, Tag::special, false);
            break;
        }
        case Task::role_qa: {
            if (parts.text.empty()) throw FormatError("role_qa requires a question");
            if (parts.speaker_slot) detail::push_speaker(s);
            detail::push_text(s, parts.text, vocab, Tag::text_q, false);
            s.push(Vocabulary::MARK_TA, Tag::special, false);
            break;
        }
    }
    return s;
}

// ---------------------------------------------------------------------------
// Grouped view consumed by the model: one item per transformer position.

struct StreamItem {
    enum class Kind { token, speaker_slot, group };
    Kind kind = Kind::token;
    int token = 0;          // for Kind::token
    TokenGroup group;       // for Kind::group
    Tag tag = Tag::special;
    bool masked = false;    // this item is a prediction target
};

struct GroupedStream {
    std::vector<StreamItem> items;

    std::size_t size() const { return items.size(); }
};

// Packs every speech_a run of the stream into g-token groups. Speech spans
// must be whole frames; with g == 1 the stream maps one token per item.
inline GroupedStream group_stream(const TokenStream& stream, int g,
                                  const FrameLayout& layout, const Vocabulary& vocab) {
    GroupedStream out;
    const std::size_t n = stream.size();
    std::size_t i = 0;
    while (i < n) {
        if (stream.tags[i] == Tag::speech_a) {
            std::size_t j = i;
            while (j < n && stream.tags[j] == Tag::speech_a) ++j;
            const std::size_t span = j - i;
            if (span % layout.slots_per_frame != 0) {
                throw FramingError("speech span length not a whole number of frames");
            }
            if (g == 1) {
                for (std::size_t k = i; k < j; ++k) {
                    out.items.push_back({StreamItem::Kind::token, stream.tokens[k], {},
                                         Tag::speech_a, stream.loss_mask[k]});
                }
            } else {
                std::vector<int> span_tokens(stream.tokens.begin() + i,
                                             stream.tokens.begin() + j);
                const bool masked = stream.loss_mask[i];
                for (auto& group : pack_groups(span_tokens, g, layout, Vocabulary::PAD)) {
                    StreamItem item;
                    item.kind = StreamItem::Kind::group;
                    item.group = std::move(group);
                    item.tag = Tag::speech_a;
                    item.masked = masked;
                    out.items.push_back(std::move(item));
                }
            }
            i = j;
        } else {
            StreamItem item;
            item.kind = stream.tags[i] == Tag::speaker ? StreamItem::Kind::speaker_slot
                                                       : StreamItem::Kind::token;
            item.token = stream.tokens[i];
            item.tag = stream.tags[i];
            item.masked = stream.loss_mask[i];
            out.items.push_back(std::move(item));
            ++i;
        }
    }
    return out;
}

// ---------------------------------------------------------------------------
// Text serialization: two lines per example, ids then parallel tags.

inline void write_stream(std::ostream& os, const TokenStream& s) {
    for (std::size_t i = 0; i < s.size(); ++i) {
        if (i) os << ' ';
        os << s.tokens[i];
    }
    os << '\n';
    for (std::size_t i = 0; i < s.size(); ++i) {
        if (i) os << ' ';
        os << tag_name(s.tags[i]);
    }
    os << '\n';
}

inline std::optional<TokenStream> read_stream(std::istream& is) {
    std::string id_line, tag_line;
    if (!std::getline(is, id_line)) return std::nullopt;
    if (!std::getline(is, tag_line)) throw FormatError("missing tag line");
    TokenStream s;
    std::istringstream ids(id_line), tags(tag_line);
    int id;
    while (ids >> id) s.tokens.push_back(id);
    std::string tag;
    while (tags >> tag) s.tags.push_back(tag_from_name(tag));
    if (s.tokens.size() != s.tags.size()) {
        throw FormatError("id line and tag line have different lengths");
    }
    s.loss_mask.assign(s.tokens.size(), false);
    return s;
}

}  // namespace slmlab
