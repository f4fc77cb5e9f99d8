// Every example must run to completion.

mod abs_measure {
    #![allow(dead_code)]
    include!("../examples/abs_measure.rs");

    #[test]
    fn runs() {
        main().unwrap();
    }
}

mod censoring_calibration {
    #![allow(dead_code)]
    include!("../examples/censoring_calibration.rs");

    #[test]
    fn runs() {
        main().unwrap();
    }
}

mod comparators {
    #![allow(dead_code)]
    include!("../examples/comparators.rs");

    #[test]
    fn runs() {
        main().unwrap();
    }
}

mod interval_test {
    #![allow(dead_code)]
    include!("../examples/interval_test.rs");

    #[test]
    fn runs() {
        main().unwrap();
    }
}

mod kidney_report {
    #![allow(dead_code)]
    include!("../examples/kidney_report.rs");

    #[test]
    fn runs() {
        main().unwrap();
    }
}

mod km_curve {
    #![allow(dead_code)]
    include!("../examples/km_curve.rs");

    #[test]
    fn runs() {
        main().unwrap();
    }
}

mod null_diagnostic {
    #![allow(dead_code)]
    include!("../examples/null_diagnostic.rs");

    #[test]
    fn runs() {
        main().unwrap();
    }
}

mod permutation_test {
    #![allow(dead_code)]
    include!("../examples/permutation_test.rs");

    #[test]
    fn runs() {
        main().unwrap();
    }
}

mod simulate_cell {
    #![allow(dead_code)]
    include!("../examples/simulate_cell.rs");

    #[test]
    fn runs() {
        main().unwrap();
    }
}

mod study_summary {
    #![allow(dead_code)]
    include!("../examples/study_summary.rs");

    #[test]
    fn runs() {
        main().unwrap();
    }
}
