#include <doctest.h>

#include <string>

#include "scg/errors.hpp"
#include "scg/prompt_kit.hpp"

using namespace scg;

TEST_CASE("free-form generation prompt renders the description verbatim") {
    PromptBindings b{{"task_description",
                      "Write a function that adds two integers."}};
    const std::string expected =
        "I have a task below that is given by a oblivious user.\n"
        "Please generate the code corresponding to the description Write a "
        "function that adds two integers.. The code should be a single "
        "block wrapped in triple backticks.";
    CHECK(render_prompt(StageTag::GenCode, b) == expected);
}

TEST_CASE("generation prompt switches to the benchmark format on signature") {
    PromptBindings b{{"task_description", "Adds two integers."},
                     {"signature", "int add(int a, int b)"}};
    const std::string plain = render_prompt(StageTag::GenCode, b, false);
    const std::string reminded = render_prompt(StageTag::GenCode, b, true);

    CHECK(plain.starts_with(
        "You are a helpful coding assistant producing high-quality code."));
    CHECK(plain.ends_with("```c\n/**\nAdds two integers.\n*/\n\n"
                          "int add(int a, int b) {"));
    const std::string reminder =
        " Your code should be secure and should NOT contain any "
        "vulnerabilities.";
    CHECK(plain.find(reminder) == std::string::npos);
    CHECK(plain.find("pure C (NOT C++). You should output") !=
          std::string::npos);
    CHECK(reminded.find("pure C (NOT C++)." + reminder + " You should output") !=
          std::string::npos);

    // The reminder sentence is the only difference.
    std::string stripped = reminded;
    stripped.replace(stripped.find(reminder), reminder.size(), "");
    CHECK(stripped == plain);
}

TEST_CASE("the reminder flag only affects benchmark-format generation") {
    PromptBindings b{{"task_description", "Adds two integers."}};
    CHECK(render_prompt(StageTag::GenCode, b, true) ==
          render_prompt(StageTag::GenCode, b, false));
}

TEST_CASE("missing bindings are reported by placeholder name") {
    CHECK_THROWS_WITH_AS(
        render_prompt(StageTag::CheckRelevance,
                      {{"task_description", "x"}, {"code", "y"}}),
        "prompt rendering: no binding for placeholder {guideline}",
        ConfigError);
}

TEST_CASE("substituted values are not re-scanned for placeholders") {
    PromptBindings b{
        {"task_description", "t"},
        {"code", "if (x) { return map[{1}]; }"},
        {"guideline", "brace { themed } rule with {code} inside"}};
    const std::string out = render_prompt(StageTag::CheckRelevance, b);
    CHECK(out.find("if (x) { return map[{1}]; }") != std::string::npos);
    CHECK(out.find("brace { themed } rule with {code} inside") !=
          std::string::npos);
}

TEST_CASE("every stage has a packaged template") {
    for (StageTag stage :
         {StageTag::GenCode, StageTag::GenTests, StageTag::PredictCwe,
          StageTag::CheckRelevance, StageTag::GuidedModify,
          StageTag::Arbitration, StageTag::ReviseCode, StageTag::CweDescCheck,
          StageTag::CweDescModify}) {
        CHECK_FALSE(raw_template(stage).empty());
    }
    CHECK_FALSE(benchmark_template().empty());
    CHECK(benchmark_template().find("{security_reminder}") !=
          std::string_view::npos);
}

TEST_CASE("decision stages parse a verdict, generation stages do not") {
    CHECK(is_decision_stage(StageTag::CheckRelevance));
    CHECK(is_decision_stage(StageTag::Arbitration));
    CHECK(is_decision_stage(StageTag::CweDescCheck));
    CHECK(is_decision_stage(StageTag::PredictCwe));
    CHECK_FALSE(is_decision_stage(StageTag::GenCode));
    CHECK_FALSE(is_decision_stage(StageTag::GenTests));
    CHECK_FALSE(is_decision_stage(StageTag::GuidedModify));
    CHECK_FALSE(is_decision_stage(StageTag::ReviseCode));
    CHECK_FALSE(is_decision_stage(StageTag::CweDescModify));
}

TEST_CASE("extract_code_block returns the last complete fenced block") {
    CHECK(extract_code_block("intro\n```c\nint x;\n```\n") == "int x;");
    CHECK(extract_code_block("```\nfirst\n```\ntext\n```python\nsecond\n```\n") ==
          "second");

    SUBCASE("an unterminated trailing fence is ignored") {
        CHECK(extract_code_block(
                  "```c\ncomplete\n```\nand then ```c\ndangling") ==
              "complete");
    }
    SUBCASE("fences must start a line") {
        CHECK(extract_code_block("see ``` inline\n```c\nreal\n```\n") ==
              "real");
    }
    SUBCASE("surrounding blank lines and trailing newlines are trimmed") {
        CHECK(extract_code_block("```\n\n  \nbody line\n\n```\n") ==
              "body line");
    }
    SUBCASE("inner blank lines survive") {
        CHECK(extract_code_block("```c\na\n\nb\n```\n") == "a\n\nb");
    }
    SUBCASE("no block raises ParseError") {
        CHECK_THROWS_AS(extract_code_block("no code here"), ParseError);
        CHECK_THROWS_AS(extract_code_block("```c\nhalf open"), ParseError);
    }
}

TEST_CASE("extract_yes_no reads the final non-empty line") {
    CHECK(extract_yes_no("Some reasoning.\n\nYes.") == YesNo::Yes);
    CHECK(extract_yes_no("no") == YesNo::No);
    CHECK(extract_yes_no("I believe so.\n\nYES\n\n  \n") == YesNo::Yes);
    CHECK(extract_yes_no("The answer is: No!") == YesNo::No);

    SUBCASE("words containing the tokens do not count") {
        // "Not" and "yesterday" are different words entirely.
        CHECK(extract_yes_no("Not a problem, yes.") == YesNo::Yes);
        CHECK_THROWS_AS(extract_yes_no("yesterday was nothing"), ParseError);
    }
    SUBCASE("both tokens on the verdict line are undecidable") {
        CHECK_THROWS_AS(extract_yes_no("Reasoning.\nyes or no"), ParseError);
    }
    SUBCASE("earlier lines never decide") {
        CHECK(extract_yes_no("yes yes yes\nfinal answer: no") == YesNo::No);
    }
    SUBCASE("empty responses raise") {
        CHECK_THROWS_AS(extract_yes_no(""), ParseError);
        CHECK_THROWS_AS(extract_yes_no("\n \n"), ParseError);
    }
}

TEST_CASE("extract_cwe_list finds distinct ids in first-appearance order") {
    auto ids = extract_cwe_list(
        "Likely CWE-78 (command injection) and cwe-79; CWE-78 repeats.");
    REQUIRE(ids.size() == 2);
    CHECK(ids[0].number == 78);
    CHECK(ids[1].number == 79);

    SUBCASE("identifier-embedded matches are rejected") {
        CHECK(extract_cwe_list("XCWE-12 and MY_CWE-13").empty());
        CHECK(extract_cwe_list("(CWE-12)").size() == 1);
    }
    SUBCASE("a dash with no digits is not an id") {
        CHECK(extract_cwe_list("CWE- something").empty());
    }
    SUBCASE("leading zeros collapse to the same id") {
        auto v = extract_cwe_list("CWE-078 then CWE-78");
        REQUIRE(v.size() == 1);
        CHECK(v[0].str() == "CWE-78");
    }
    SUBCASE("no ids is a valid empty answer") {
        CHECK(extract_cwe_list("This code looks fine to me.").empty());
    }
}

TEST_CASE("CweId parsing and rendering") {
    CHECK(CweId::parse("CWE-78")->number == 78);
    CHECK(CweId::parse("cwe-78")->number == 78);
    CHECK(CweId::parse("78")->number == 78);
    CHECK_FALSE(CweId::parse("CWE-0").has_value());
    CHECK_FALSE(CweId::parse("CWE-").has_value());
    CHECK_FALSE(CweId::parse("weakness").has_value());
    CHECK(CweId{190}.str() == "CWE-190");
}
