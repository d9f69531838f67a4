#![no_main]

use contextium::Context;
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    if let Ok(ctx) = serde_json::from_slice::<Context>(data) {
        // anything accepted must satisfy the context invariants
        let [a, b, c] = *ctx.members();
        assert!(a.commutes(&b).unwrap() && a.commutes(&c).unwrap() && b.commutes(&c).unwrap());
        assert!(ctx.sign() == 1 || ctx.sign() == -1);
        let json = serde_json::to_vec(&ctx).unwrap();
        assert_eq!(serde_json::from_slice::<Context>(&json).unwrap(), ctx);
    }
});
