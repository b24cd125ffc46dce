#include "dtdsim/profile.hpp"

#include <sstream>

#include "dtdsim/error.hpp"
#include "dtdsim/rng.hpp"

namespace dtdsim {

namespace {

// Keep this text byte-identical to assets/profile_vocab.txt; a unit test
// enforces the parity so the asset stays honest.
constexpr const char* kBuiltinVocabText = R"VOCAB(# Traveler profile vocabulary.
# Sections are [name] headers followed by one entry per line.
# Trait axes pair the two poles of one personality dimension as
# "positive|negative"; the sampler picks one pole per axis.

[first_names]
James
Mary
Robert
Patricia
John
Jennifer
Michael
Linda
David
Elizabeth
William
Barbara
Richard
Susan
Joseph
Jessica
Thomas
Sarah
Carol
Karen
Dorothy
Sandra
Ashley
Kimberly
Emily
Donald
Michelle
Kevin
Laura
Brian

[last_names]
Smith
Johnson
Williams
Brown
Jones
Garcia
Miller
Davis
Rodriguez
Martinez
Hernandez
Lopez
Gonzalez
Wilson
Anderson
Thomas
Taylor
Moore
Jackson
Martin
Lee
Perez
Thompson
White
Harris
Sanchez
Clark
Ramirez
Lewis
Robinson
Walker
Young
Allen
King
Wright
Scott
Torres
Nguyen
Hill
Flores
Green
Adams
Nelson
Baker
Hall
Rivera
Campbell
Mitchell
Carter
Roberts

[genders]
male
female
non-binary or other gender

[age_brackets]
18 and 24
25 and 34
35 and 44
45 and 54
55 and 64
65 and 74

[income_levels]
low
middle
high

[occupations]
an employee
self-employed
retired
a student
unemployed

[educations]
a high school education
an associate degree
a bachelor's degree
a master's degree
a doctorate

[risk_preferences]
risk-averse
risk-neutral
risk-seeking

[trip_purposes]
commuting
business
leisure
shopping
education

[trait_axes]
extroverted|introverted
agreeable|antagonistic
conscientious|unconscientious
neurotic|emotionally stable
open to experience|closed to experience
)VOCAB";

std::vector<std::string>* section_for(ProfileVocabulary& vocab, const std::string& name) {
    if (name == "first_names") return &vocab.first_names;
    if (name == "last_names") return &vocab.last_names;
    if (name == "genders") return &vocab.genders;
    if (name == "age_brackets") return &vocab.age_brackets;
    if (name == "income_levels") return &vocab.income_levels;
    if (name == "occupations") return &vocab.occupations;
    if (name == "educations") return &vocab.educations;
    if (name == "risk_preferences") return &vocab.risk_preferences;
    if (name == "trip_purposes") return &vocab.trip_purposes;
    return nullptr;  // trait_axes is handled separately
}

std::string strip(const std::string& s) {
    auto begin = s.find_first_not_of(" \t\r\n");
    if (begin == std::string::npos) return "";
    auto end = s.find_last_not_of(" \t\r\n");
    return s.substr(begin, end - begin + 1);
}

const std::string& pick(Rng& rng, const std::vector<std::string>& pool, const char* what) {
    if (pool.empty()) throw ConfigError(std::string("profile vocabulary has no ") + what);
    return pool[rng.bounded(pool.size())];
}

}  // namespace

const ProfileVocabulary& ProfileVocabulary::builtin() {
    static const ProfileVocabulary vocab = parse(kBuiltinVocabText);
    return vocab;
}

ProfileVocabulary ProfileVocabulary::parse(const std::string& text) {
    ProfileVocabulary vocab;
    std::istringstream in(text);
    std::string line;
    std::string section;
    while (std::getline(in, line)) {
        line = strip(line);
        if (line.empty() || line[0] == '#') continue;
        if (line.front() == '[' && line.back() == ']') {
            section = line.substr(1, line.size() - 2);
            continue;
        }
        if (section.empty()) throw ConfigError("vocabulary entry before any [section] header");
        if (section == "trait_axes") {
            auto bar = line.find('|');
            if (bar == std::string::npos)
                throw ConfigError("trait axis must be 'positive|negative': " + line);
            vocab.trait_axes.push_back({strip(line.substr(0, bar)), strip(line.substr(bar + 1))});
            continue;
        }
        auto* target = section_for(vocab, section);
        if (target == nullptr) throw ConfigError("unknown vocabulary section [" + section + "]");
        target->push_back(line);
    }
    return vocab;
}

std::string Profile::render() const {
    std::ostringstream out;
    out << "Your name is " << name << ". You are a " << gender << " character, aged between "
        << age_bracket << ", with a " << income_level << " income level, " << occupation
        << ", with " << education << ", " << risk_preference << ", and traveling for "
        << trip_purpose << ". You are a character who is " << traits[0] << ", " << traits[1]
        << ", " << traits[2] << ", " << traits[3] << ", and " << traits[4] << ".";
    if (selfish) out << " You are selfish.";
    return out.str();
}

Profile sample_profile(std::uint64_t seed, const ProfileVocabulary& vocab) {
    Rng rng(seed);
    Profile p;
    p.name = pick(rng, vocab.first_names, "first names") + " " +
             pick(rng, vocab.last_names, "last names");
    p.gender = pick(rng, vocab.genders, "genders");
    p.age_bracket = pick(rng, vocab.age_brackets, "age brackets");
    p.income_level = pick(rng, vocab.income_levels, "income levels");
    p.occupation = pick(rng, vocab.occupations, "occupations");
    p.education = pick(rng, vocab.educations, "educations");
    p.risk_preference = pick(rng, vocab.risk_preferences, "risk preferences");
    p.trip_purpose = pick(rng, vocab.trip_purposes, "trip purposes");
    if (vocab.trait_axes.size() != p.traits.size())
        throw ConfigError("profile vocabulary must define exactly 5 trait axes");
    for (std::size_t i = 0; i < p.traits.size(); ++i)
        p.traits[i] = vocab.trait_axes[i][rng.bounded(2)];
    return p;
}

}  // namespace dtdsim
