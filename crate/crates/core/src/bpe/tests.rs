use super::*;

fn cfg(target: usize) -> TrainConfig {
    TrainConfig::with_target(target)
}

fn tokens_of(tok: &Tokenizer, ids: &[TokenId]) -> Vec<Vec<u8>> {
    ids.iter().map(|&i| tok.vocab().token(i).unwrap().to_vec()).collect()
}

#[test]
fn aaaa_merges() {
    let t = train_bpe(&["aaaa"], &cfg(258)).unwrap();
    let m = t.merges();
    assert_eq!(m.len(), 2);
    assert_eq!((m[0].left, m[0].right, m[0].result), (97, 97, 256));
    assert_eq!((m[1].left, m[1].right, m[1].result), (256, 256, 257));
    assert_eq!(t.encode("aaaa"), vec![257]);
}

#[test]
fn tibetan_codepoint_in_two_merges() {
    let text = "ཀ".repeat(100);
    let t = train_bpe(&[text.as_str()], &cfg(258)).unwrap();
    assert_eq!(t.vocab().token(257).unwrap(), "ཀ".as_bytes());
    assert_eq!(t.encode("ཀ"), vec![257]);
}

#[test]
fn ties_prefer_smaller_bytes() {
    // "ab" and "cd" both occur twice; "ab" wins on left bytes.
    let t = train_bpe(&["ab", "cd", "ab", "cd"], &cfg(257)).unwrap();
    assert_eq!(t.vocab().token(256).unwrap(), b"ab");
    let r = train_bpe_reference(&["ab", "cd", "ab", "cd"], &cfg(257)).unwrap();
    assert_eq!(t.merges(), r.merges());
}

#[test]
fn pairs_do_not_cross_documents() {
    let t = train_bpe(&["xa", "bx", "ab"], &cfg(300)).unwrap();
    // "ab" occurs once inside a document; "a"+"b" across documents is not a pair.
    let pairs: Vec<_> = t.merges().iter().map(|m| tokens_of(&t, &[m.left, m.right])).collect();
    assert_eq!(pairs.iter().filter(|p| p[0] == b"a" && p[1] == b"b").count(), 1);
    assert_eq!(t.merges().len(), 3);
}

#[test]
fn stops_at_min_pair_count() {
    let c = TrainConfig { min_pair_count: 2, ..cfg(300) };
    let t = train_bpe(&["abcabc"], &c).unwrap();
    assert_eq!(t.vocab_size(), 256 + 2);
}

#[test]
fn errors() {
    assert!(matches!(train_bpe(&[""], &cfg(300)), Err(Error::EmptyCorpus)));
    assert!(matches!(train_bpe::<&str>(&[], &cfg(300)), Err(Error::EmptyCorpus)));
    assert!(train_bpe(&["abc"], &cfg(256)).is_err());
    assert!(matches!(Tokenizer::byte_level().decode(&[999]), Err(Error::UnknownToken(999))));
}

#[test]
fn overlapping_runs_match_reference() {
    for corpus in [vec!["aaaaa aaa aaaaaaa"], vec!["abababab", "bababa"], vec!["ཀཀཀ་ཀཀ"]] {
        let a = train_bpe(&corpus, &cfg(290)).unwrap();
        let b = train_bpe_reference(&corpus, &cfg(290)).unwrap();
        assert_eq!(a.merges(), b.merges(), "{corpus:?}");
    }
}

/// Merges, by hand: (h,e)=256, (l,l)=257, (he,ll)=258, (o,' ')=259.
/// "hello hell" as bytes h e l l o ' ' h e l l:
///   rank 0 (h,e): he l l o ' ' he l l
///   rank 1 (l,l): he ll o ' ' he ll
///   rank 2 (he,ll): hell o ' ' hell
///   rank 3 (o,' '): hell "o " hell
#[test]
fn hand_traced_encoding() {
    let mut v = Vocabulary::byte_level();
    let he = v.add_token(b"he");
    let ll = v.add_token(b"ll");
    let hell = v.add_token(b"hell");
    let o_sp = v.add_token(b"o ");
    let rule = |rank, left, right, result| MergeRule { rank, left, right, result };
    let merges = vec![
        rule(0, b'h' as u32, b'e' as u32, he),
        rule(1, b'l' as u32, b'l' as u32, ll),
        rule(2, he, ll, hell),
        rule(3, b'o' as u32, b' ' as u32, o_sp),
    ];
    let t = Tokenizer::new(v, merges).unwrap();
    assert_eq!(t.encode("hello hell"), vec![hell, o_sp, hell]);
    assert_eq!(t.encode("lll"), vec![ll, b'l' as u32]);
    assert_eq!(t.decode(&[hell, o_sp]).unwrap(), "hello ");
    assert_eq!(t.decode(&[b'a' as u32]).unwrap(), "a");
}

#[test]
fn lower_rank_pair_created_mid_batch_waits() {
    // (X,a) outranks (a,b) even though X = "ab". Merging the first "ab"
    // creates (X,a), which must not eat the second occurrence's "a".
    let mut v = Vocabulary::byte_level();
    let x = v.add_token(b"ab");
    let y = v.add_token(b"aba");
    let rule = |rank, left, right, result| MergeRule { rank, left, right, result };
    let t = Tokenizer::new(v, vec![rule(0, x, 97, y), rule(1, 97, 98, x)]).unwrap();
    assert_eq!(t.encode("abab"), vec![x, x]);
    assert_eq!(t.encode("aba"), vec![y]);
}

#[test]
fn empty_and_roundtrip() {
    let t = train_bpe(&["the cat sat on the mat with the hat", "བཀྲ་ཤིས་བདེ་ལེགས། བཀྲ་ཤིས།"], &cfg(320)).unwrap();
    assert!(t.encode("").is_empty());
    for s in ["", "the hat", "བཀྲ་ཤིས་", "mixed བཀྲ་ text 🎉", "\u{0}\u{7f}\n\t"] {
        assert_eq!(t.decode_strict(&t.encode(s)).unwrap(), s);
    }
}

#[test]
fn partial_utf8_decodes_lossily() {
    let t = Tokenizer::byte_level();
    let ids = t.encode("ཀ");
    assert_eq!(t.decode(&ids[..2]).unwrap(), "\u{FFFD}");
    assert!(matches!(t.decode_strict(&ids[..2]), Err(Error::InvalidUtf8)));
}

#[test]
fn merge_vocab_sizes() {
    let base = train_bpe(&["hello world hello there"], &cfg(270)).unwrap();
    let same = merge_vocab(&base, &base).unwrap();
    assert_eq!(same.vocab_size(), base.vocab_size());
    assert_eq!(same.merges(), base.merges());

    let add = train_bpe(&["ཀཀཀཀ ཁཁཁཁ"], &cfg(262)).unwrap();
    let merged = merge_vocab(&base, &add).unwrap();
    assert_eq!(merged.vocab_size(), base.vocab_size() + 6);
    assert_eq!(merged.encode("ཀཀཀཀ").len(), add.encode("ཀཀཀཀ").len());
    assert!(merged.encode("ཀཀཀཀ").len() < Tokenizer::byte_level().encode("ཀཀཀཀ").len());
    assert_eq!(merged.encode("hello world hello there"), base.encode("hello world hello there"));
}

#[test]
fn merge_vocab_rejects_incomplete_base() {
    let mut v = Vocabulary::default();
    for b in 0..=254u8 {
        v.add_token(&[b]);
    }
    assert!(Tokenizer::new(v, Vec::new()).is_err());
}

#[test]
fn specials_are_appended_and_decoded() {
    let mut t = train_bpe(&["abcabc"], &cfg(258)).unwrap();
    let eot = t.add_special("<|endoftext|>");
    assert_eq!(eot as usize, t.vocab_size() - 1);
    assert_eq!(t.special_id("<|endoftext|>"), Some(eot));
    // The special's name in text is ordinary bytes.
    assert!(!t.encode("<|endoftext|>").contains(&eot));
    assert_eq!(t.decode(&[eot]).unwrap(), "<|endoftext|>");
}

#[test]
fn escaping_roundtrips() {
    for bytes in [&b"\\"[..], b"\\x41", b" ", b"\n\t\r", b"\xff\xe0", "ཀ་".as_bytes(), b"\\S", &[0xe0, 0xbd]] {
        let e = escape_token(bytes);
        assert!(!e.contains('\n') && !e.contains(' '));
        assert_eq!(unescape_token(&e).unwrap(), bytes);
    }
    assert!(unescape_token("\\q").is_err());
    assert!(unescape_token("\\x4").is_err());
}

#[test]
fn files_roundtrip_bit_exact() {
    let mut t = train_bpe(&["a b c ab ab \\ \\ \n\n ཀ་ཀ་ཀ་"], &cfg(280)).unwrap();
    t.add_special("<|endoftext|>");
    let dir = tempfile::tempdir().unwrap();
    t.save_dir(dir.path()).unwrap();
    let back = Tokenizer::load_dir(dir.path()).unwrap();
    assert_eq!(back, t);
    assert_eq!(back.vocab_text(), t.vocab_text());
    assert_eq!(back.fingerprint(), t.fingerprint());
    let v = std::fs::read_to_string(dir.path().join("vocab.txt")).unwrap();
    assert_eq!(v.lines().count(), t.vocab_size());
    assert!(v.lines().last().unwrap().starts_with("\\S"));
}

#[test]
fn corrupt_merges_rejected() {
    let t = Tokenizer::byte_level();
    assert!(Tokenizer::from_texts(&t.vocab_text(), "0\t97\t98\t99\n").is_err());
    assert!(Tokenizer::from_texts(&t.vocab_text(), "0\t97\n").is_err());
}

#[test]
fn compression_baselines() {
    let t = Tokenizer::byte_level();
    let r = t.compression("plain ascii text");
    assert_eq!(r.ratio, 1.0);
    let r = t.compression("བཀྲ་ཤིས་བདེ་ལེགས།");
    assert_eq!(r.ratio, 1.0 / 3.0);
    let r = t.compression("ab ཀ");
    assert_eq!(r.per_script["tibetan"], ScriptCounts { codepoints: 1, tokens: 3 });
    assert_eq!(r.per_script["other"], ScriptCounts { codepoints: 3, tokens: 3 });
    assert_eq!(r.tokens, 6);
}
