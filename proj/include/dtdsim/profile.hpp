#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

namespace dtdsim {

/// Word lists the profile sampler draws from. The canonical copy is the
/// checked-in asset (assets/profile_vocab.txt); builtin() is the compiled-in
/// mirror and a unit test keeps the two identical.
struct ProfileVocabulary {
    std::vector<std::string> first_names;
    std::vector<std::string> last_names;
    std::vector<std::string> genders;
    std::vector<std::string> age_brackets;
    std::vector<std::string> income_levels;
    std::vector<std::string> occupations;
    std::vector<std::string> educations;
    std::vector<std::string> risk_preferences;
    std::vector<std::string> trip_purposes;
    // Each axis is a {positive, negative} pole pair.
    std::vector<std::array<std::string, 2>> trait_axes;

    static const ProfileVocabulary& builtin();
    static ProfileVocabulary parse(const std::string& text);
};

struct Profile {
    std::string name;
    std::string gender;
    std::string age_bracket;      // e.g. "45 and 54"
    std::string income_level;     // low | middle | high
    std::string occupation;       // rendered with its own article, e.g. "an employee"
    std::string education;        // e.g. "an associate degree"
    std::string risk_preference;  // e.g. "risk-averse"
    std::string trip_purpose;     // e.g. "shopping"
    std::array<std::string, 5> traits;
    bool selfish = false;

    /// The prompt sentence(s), exactly as the published profile texts read.
    std::string render() const;
};

/// Deterministic profile draw: every field uniform over the vocabulary.
Profile sample_profile(std::uint64_t seed,
                       const ProfileVocabulary& vocab = ProfileVocabulary::builtin());

}  // namespace dtdsim
