// mdbook cannot run Rust listings against a local crate, so every chapter is
// pulled in as the documentation of an empty module and `cargo test --doc`
// runs its code blocks. One module per chapter keeps failures traceable to a
// file. Shell listings are fenced as `sh` and are not run.

#[doc = include_str!("src/introduction.md")]
pub mod introduction {}
#[doc = include_str!("src/normal_model.md")]
pub mod normal_model {}
#[doc = include_str!("src/sign.md")]
pub mod sign {}
#[doc = include_str!("src/point_mass.md")]
pub mod point_mass {}
#[doc = include_str!("src/interval_null.md")]
pub mod interval_null {}
#[doc = include_str!("src/oracle.md")]
pub mod oracle {}
#[doc = include_str!("src/numerics.md")]
pub mod numerics {}
#[doc = include_str!("src/cli.md")]
pub mod cli {}
