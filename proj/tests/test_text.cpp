#include "doctest.h"
#include "uq/text.hpp"

using namespace uq;

TEST_SUITE("text") {

TEST_CASE("trim strips surrounding ascii whitespace only") {
    CHECK(text::trim("  hello  ") == "hello");
    CHECK(text::trim("\t\n hello world \r\n") == "hello world");
    CHECK(text::trim("hello") == "hello");
    CHECK(text::trim("") == "");
    CHECK(text::trim(" \t\r\n ") == "");
    CHECK(text::trim("a  b") == "a  b");
}

TEST_CASE("case folding is ascii-only") {
    CHECK(text::to_lower("AbC dEf") == "abc def");
    CHECK(text::to_upper("AbC dEf") == "ABC DEF");
    CHECK(text::to_lower("123!@#") == "123!@#");
    // Non-ASCII bytes pass through untouched.
    const std::string utf8 = "caf\xc3\xa9";
    CHECK(text::to_lower(utf8) == utf8);
}

TEST_CASE("split_ws produces no empty tokens") {
    CHECK(text::split_ws("a b c") == std::vector<std::string>{"a", "b", "c"});
    CHECK(text::split_ws("  a\t\tb \n c  ") == std::vector<std::string>{"a", "b", "c"});
    CHECK(text::split_ws("") == std::vector<std::string>{});
    CHECK(text::split_ws("   ") == std::vector<std::string>{});
    CHECK(text::split_ws("one") == std::vector<std::string>{"one"});
}

TEST_CASE("contains is plain substring search") {
    CHECK(text::contains("film director", "director"));
    CHECK_FALSE(text::contains("direct", "director"));
    CHECK(text::contains("anything", ""));
    CHECK_FALSE(text::contains("", "x"));
}

TEST_CASE("sha256_hex matches known vectors") {
    CHECK(text::sha256_hex("") ==
          "e3b0c44298fc1c149afbf4c8996fb92427ae41e4649b934ca495991b7852b855");
    CHECK(text::sha256_hex("abc") ==
          "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
    CHECK(text::sha256_hex("abc").size() == 64);
}

TEST_CASE("trim_trailing_newlines removes only trailing newline bytes") {
    CHECK(text::trim_trailing_newlines("a\n") == "a");
    CHECK(text::trim_trailing_newlines("a\r\n\r\n") == "a");
    CHECK(text::trim_trailing_newlines("a\n\r") == "a");
    CHECK(text::trim_trailing_newlines("\na") == "\na");
    CHECK(text::trim_trailing_newlines("a \n") == "a ");
    CHECK(text::trim_trailing_newlines("a") == "a");
    CHECK(text::trim_trailing_newlines("") == "");
    CHECK(text::trim_trailing_newlines("\n\n") == "");
}

}  // TEST_SUITE
