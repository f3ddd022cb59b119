#pragma once

#include <gtest/gtest.h>

#include "amw/error.hpp"

#define EXPECT_AMW_ERROR(stmt, expected_code)                                    \
  do {                                                                           \
    try {                                                                        \
      stmt;                                                                      \
      ADD_FAILURE() << "expected amw::Error from " #stmt;                        \
    } catch (const amw::Error& e_) {                                             \
      EXPECT_EQ(e_.code(), expected_code) << e_.what();                          \
    }                                                                            \
  } while (false)
