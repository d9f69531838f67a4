#![no_main]

use contextium::Inequality;
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    if let Ok(ineq) = serde_json::from_slice::<Inequality>(data) {
        for term in &ineq.terms {
            assert_eq!(term.context.n(), ineq.n);
            assert_eq!(term.coeff, term.context.sign());
        }
        let json = serde_json::to_vec(&ineq).unwrap();
        let back = serde_json::from_slice::<Inequality>(&json).unwrap();
        assert_eq!(back.n, ineq.n);
        assert_eq!(back.terms.len(), ineq.terms.len());
    }
});
