#include "tourb/messages.hpp"

#include <sstream>

namespace tourb {

const char* msg_kind_name(MsgKind k) {
    switch (k) {
        case MsgKind::UrbData: return "DATA";
        case MsgKind::UrbAck: return "ACK";
        case MsgKind::UrbWm: return "WM";
        case MsgKind::Sync: return "SYNC";
        case MsgKind::SyncAck: return "SYNCACK";
        case MsgKind::ConsReport: return "CREP";
        case MsgKind::ConsPre: return "CPRE";
        case MsgKind::ConsPreAck: return "CPREACK";
        case MsgKind::ConsDec: return "CDEC";
        case MsgKind::ConsDecAck: return "CDECACK";
        case MsgKind::Beacon: return "BEACON";
    }
    return "?";
}

std::string Message::render() const {
    std::ostringstream os;
    os << msg_kind_name(kind);
    switch (kind) {
        case MsgKind::UrbData:
            os << ",s=" << sender << ",n=" << num << ",p=" << payload;
            break;
        case MsgKind::UrbAck:
            os << ",s=" << sender << ",n=" << num;
            break;
        case MsgKind::UrbWm:
            os << ",h=" << head << ",t=" << tail;
            break;
        case MsgKind::Sync:
            os << ",qn=" << qn;
            break;
        case MsgKind::SyncAck:
            os << ",qn=" << qn << ",sq=" << seq << ",ob=" << obs;
            break;
        case MsgKind::ConsReport:
            os << ",r=" << cseq << ",pr=" << has_prop << ",lk=" << lock_rank
               << ",dc=" << has_dec;
            break;
        case MsgKind::ConsPre:
            os << ",r=" << cseq << ",rk=" << rank;
            break;
        case MsgKind::ConsPreAck:
            os << ",r=" << cseq << ",rk=" << rank;
            break;
        case MsgKind::ConsDec:
            os << ",r=" << cseq << ",dg=" << dec.digest();
            break;
        case MsgKind::ConsDecAck:
            os << ",r=" << cseq;
            break;
        case MsgKind::Beacon:
            break;
    }
    return os.str();
}

}  // namespace tourb
