use proptest::prelude::*;

use octavic::cusps::{decode_octt, encode_octt, read_octt_file, write_octt_file, CuspMatrix};

fn matrix() -> impl Strategy<Value = CuspMatrix> {
    (0usize..6, 0usize..9).prop_flat_map(|(rows, cols)| {
        (
            proptest::collection::vec(prop_oneof![0u8..4, Just(255u8)], rows * cols),
            proptest::collection::vec(any::<i64>(), rows),
        )
            .prop_map(move |(entries, denominators)| CuspMatrix { rows, cols, entries, denominators })
    })
}

proptest! {
    #[test]
    fn round_trip(m in matrix()) {
        let bytes = encode_octt(&m).unwrap();
        prop_assert_eq!(bytes.len(), 16 + m.rows * m.cols + 8 * m.rows);
        prop_assert_eq!(decode_octt(&bytes).unwrap(), m);
    }

    #[test]
    fn arbitrary_bytes_never_panic(bytes in proptest::collection::vec(any::<u8>(), 0..64)) {
        let _ = decode_octt(&bytes);
    }

    #[test]
    fn corrupted_headers_are_rejected(m in matrix(), pos in 0usize..16, byte in any::<u8>()) {
        let mut bytes = encode_octt(&m).unwrap();
        prop_assume!(bytes[pos] != byte);
        bytes[pos] = byte;
        // only the header fields that encode dimensions could still decode, and then to a different shape
        if let Ok(d) = decode_octt(&bytes) {
            prop_assert!(pos >= 8);
            prop_assert!(d.rows != m.rows || d.cols != m.cols);
        }
    }
}

#[test]
fn file_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("m.octt");
    let m = CuspMatrix { rows: 2, cols: 2, entries: vec![0, 255, 3, 1], denominators: vec![256, -65536] };
    write_octt_file(&m, &path).unwrap();
    assert_eq!(read_octt_file(&path).unwrap(), m);
}
