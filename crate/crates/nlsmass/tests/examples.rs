//! The quick examples run to completion.

macro_rules! example {
    ($name:ident, $file:literal) => {
        #[path = $file]
        mod $name;

        #[test]
        fn $name() {
            $name::main().expect(concat!(stringify!($name), " example should run"));
        }
    };
}

example!(identities, "../examples/identities.rs");
example!(scaling_laws, "../examples/scaling_laws.rs");
example!(hypotheses, "../examples/hypotheses.rs");
example!(d_of_m, "../examples/d_of_m.rs");
example!(augmented_flow, "../examples/augmented_flow.rs");
example!(run_report, "../examples/run_report.rs");
