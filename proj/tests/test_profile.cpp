#include <doctest.h>

#include <fstream>
#include <sstream>

#include "dtdsim/error.hpp"
#include "dtdsim/profile.hpp"

using namespace dtdsim;

namespace {

std::string read_text_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    REQUIRE_MESSAGE(bool(in), "cannot open " << path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

/// Golden files end with exactly one newline added by the editor.
std::string read_golden(const std::string& name) {
    std::string text = read_text_file(std::string(DTDSIM_TESTS_DIR) + "/golden/" + name);
    if (!text.empty() && text.back() == '\n') text.pop_back();
    return text;
}

Profile fixture_profile() {
    Profile p;
    p.name = "Dorothy Roberts";
    p.gender = "non-binary or other gender";
    p.age_bracket = "45 and 54";
    p.income_level = "high";
    p.occupation = "retired";
    p.education = "an associate degree";
    p.risk_preference = "risk-neutral";
    p.trip_purpose = "shopping";
    p.traits = {"introverted", "antagonistic", "unconscientious", "neurotic",
                "open to experience"};
    return p;
}

}  // namespace

TEST_CASE("profile renders the full character sentence") {
    CHECK(fixture_profile().render() == read_golden("profile_fixture.txt"));
}

TEST_CASE("selfish profiles say so") {
    Profile p = fixture_profile();
    p.selfish = true;
    CHECK(p.render() == read_golden("profile_fixture.txt") + " You are selfish.");
}

TEST_CASE("sampling is deterministic in the seed") {
    const Profile a = sample_profile(99);
    const Profile b = sample_profile(99);
    CHECK(a.render() == b.render());
    const Profile c = sample_profile(100);
    // Neighboring seeds produce different characters (astronomically unlikely
    // to collide given the vocabulary sizes).
    CHECK(a.render() != c.render());
}

TEST_CASE("sampled fields come from the vocabulary") {
    const auto& vocab = ProfileVocabulary::builtin();
    for (std::uint64_t seed = 0; seed < 50; ++seed) {
        const Profile p = sample_profile(seed);
        bool gender_known = false;
        for (const auto& g : vocab.genders) gender_known |= (g == p.gender);
        CHECK(gender_known);
        bool purpose_known = false;
        for (const auto& t : vocab.trip_purposes) purpose_known |= (t == p.trip_purpose);
        CHECK(purpose_known);
        for (std::size_t axis = 0; axis < p.traits.size(); ++axis) {
            const auto& poles = vocab.trait_axes[axis];
            CHECK((p.traits[axis] == poles[0] || p.traits[axis] == poles[1]));
        }
    }
}

TEST_CASE("builtin vocabulary matches the shipped asset byte for byte") {
    const std::string asset = read_text_file(std::string(DTDSIM_REPO_DIR) +
                                             "/assets/profile_vocab.txt");
    const auto from_asset = ProfileVocabulary::parse(asset);
    const auto& builtin = ProfileVocabulary::builtin();
    CHECK(from_asset.first_names == builtin.first_names);
    CHECK(from_asset.last_names == builtin.last_names);
    CHECK(from_asset.genders == builtin.genders);
    CHECK(from_asset.age_brackets == builtin.age_brackets);
    CHECK(from_asset.income_levels == builtin.income_levels);
    CHECK(from_asset.occupations == builtin.occupations);
    CHECK(from_asset.educations == builtin.educations);
    CHECK(from_asset.risk_preferences == builtin.risk_preferences);
    CHECK(from_asset.trip_purposes == builtin.trip_purposes);
    CHECK(from_asset.trait_axes == builtin.trait_axes);
}

TEST_CASE("vocabulary parser rejects malformed input") {
    CHECK_THROWS_AS(ProfileVocabulary::parse("entry before header\n"), ConfigError);
    CHECK_THROWS_AS(ProfileVocabulary::parse("[no_such_section]\nentry\n"), ConfigError);
    CHECK_THROWS_AS(ProfileVocabulary::parse("[trait_axes]\nmissing bar\n"), ConfigError);
}

TEST_CASE("sampling fails loudly on an empty vocabulary section") {
    ProfileVocabulary vocab = ProfileVocabulary::builtin();
    vocab.genders.clear();
    CHECK_THROWS_AS(sample_profile(1, vocab), ConfigError);
}
