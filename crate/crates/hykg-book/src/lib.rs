//! The guide chapters as doc-tests, so `cargo test` keeps them compiling.

macro_rules! chapter {
    ($name:ident, $file:literal) => {
        #[doc = include_str!(concat!("../../../book/src/", $file))]
        pub mod $name {}
    };
}

chapter!(intro, "intro.md");
chapter!(potential, "potential.md");
chapter!(nu_method, "nu-method.md");
chapter!(closed_form, "closed-form.md");
chapter!(wavefunctions, "wavefunctions.md");
chapter!(oracle, "oracle.md");
chapter!(audit, "audit.md");
chapter!(cli, "cli.md");
