//! Tensor-product and Tanner-product codes over prime fields, with exact
//! measurements of how robust their local testers are.
//!
//! ```
//! use tensor_ltc::code::{LinearCode, Word};
//! use tensor_ltc::field::Field;
//! use tensor_ltc::ratio::frac;
//! use tensor_ltc::tester::TestInstance;
//!
//! let f = Field::new(2)?;
//! let inst = TestInstance::m_product(&LinearCode::repetition(f, 3)?, 2)?;
//! assert_eq!(inst.expected_robustness(&Word::unit(f, 9, 0))?, frac(1, 9));
//! # Ok::<(), Box<dyn std::error::Error>>(())
//! ```

pub mod code;
pub mod field;
pub mod harness;
pub mod matrix;
pub mod ratio;
pub mod tanner;
pub mod tensor;
pub mod tester;

// The guide's code blocks run as doc-tests, one module per chapter.
#[cfg(doctest)]
mod book {
    #[doc = include_str!("../../../book/src/intro.md")]
    mod intro {}
    #[doc = include_str!("../../../book/src/fields-and-codes.md")]
    mod fields_and_codes {}
    #[doc = include_str!("../../../book/src/tensor-codes.md")]
    mod tensor_codes {}
    #[doc = include_str!("../../../book/src/tanner-products.md")]
    mod tanner_products {}
    #[doc = include_str!("../../../book/src/robustness.md")]
    mod robustness {}
    #[doc = include_str!("../../../book/src/harness.md")]
    mod harness {}
}
