#include <doctest.h>

#include <sstream>

#include "angval/errors.hpp"
#include "angval/matrix_io.hpp"

using namespace angval;

TEST_CASE("matrix text format round trip") {
    Eigen::MatrixXd m(2, 3);
    m << 1.0, -0.5, 1e-17, 3.141592653589793, 2.0 / 3.0, -1e300;
    std::ostringstream os;
    write_matrix(os, m);
    std::istringstream is(os.str());
    Eigen::MatrixXd back = read_matrix(is);
    REQUIRE(back.rows() == 2);
    REQUIRE(back.cols() == 3);
    CHECK((back - m).cwiseAbs().maxCoeff() == 0.0);  // 17 digits round-trip exactly
}

TEST_CASE("matrix parser reports line numbers") {
    std::istringstream bad("2 2\n1 2\n3 oops\n");
    CHECK_THROWS_WITH_AS(read_matrix(bad), doctest::Contains("line 3"), ParseError);

    std::istringstream short_row("2 2\n1\n");
    CHECK_THROWS_AS(read_matrix(short_row), ParseError);

    std::istringstream empty("");
    CHECK_THROWS_AS(read_matrix(empty), ParseError);
}

TEST_CASE("concatenated matrix lists") {
    std::istringstream is("1 1\n2\n\n2 2\n1 0\n0 1\n");
    auto list = read_matrix_list(is);
    REQUIRE(list.size() == 2);
    CHECK(list[0](0, 0) == 2.0);
    CHECK(list[1].rows() == 2);
}
